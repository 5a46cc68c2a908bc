#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace camcond::schedule {

enum class Condition { PoseDepth, Pose };

std::string_view to_string(Condition c) noexcept;
Condition condition_from_string(std::string_view s);

/// Relative directory of the frame sequence carrying each condition.
std::string_view sequence_directory(Condition c) noexcept;

struct ScheduleEntry {
  int step = 0;
  double t = 0.0;  // normalized time, 0 at the highest-noise step
  Condition condition = Condition::Pose;
  std::string frames;
};

/// Two-phase conditioning schedule over N denoising steps: the first
/// N_D = ceil(f * N) steps carry pose+depth, the rest pose only.
struct ScheduleManifest {
  int num_steps = 0;
  double depth_fraction = 0.0;
  int depth_steps = 0;
  /// t of the last pose+depth step; empty when there is no depth phase.
  std::optional<double> t_stop;
  std::vector<ScheduleEntry> entries;
};

/// ceil(f * n), treating products within 1e-9 relative of an integer as that
/// integer so decimal fractions such as 0.7 * 10 count 7 steps, not 8.
int depth_step_count(int num_steps, double depth_fraction);

ScheduleManifest build_schedule(int num_steps, double depth_fraction);

Condition condition_at(const ScheduleManifest& manifest, int step);

}  // namespace camcond::schedule
