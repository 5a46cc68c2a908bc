#include "camcond/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "camcond/error.hpp"

namespace camcond::schedule {

std::string_view to_string(Condition c) noexcept {
  return c == Condition::PoseDepth ? "pose+depth" : "pose";
}

Condition condition_from_string(std::string_view s) {
  if (s == "pose+depth") return Condition::PoseDepth;
  if (s == "pose") return Condition::Pose;
  throw Error(ErrorCode::SchemaViolation, "unknown condition label '" + std::string(s) + "'");
}

std::string_view sequence_directory(Condition c) noexcept {
  return c == Condition::PoseDepth ? "c_pose_depth" : "c_pose";
}

int depth_step_count(int num_steps, double depth_fraction) {
  const double x = depth_fraction * static_cast<double>(num_steps);
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, x)) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(x));
}

ScheduleManifest build_schedule(int num_steps, double depth_fraction) {
  if (num_steps < 1) {
    throw Error(ErrorCode::InvalidSteps, "num_steps must be >= 1, got " + std::to_string(num_steps));
  }
  if (!(depth_fraction >= 0.0 && depth_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidFraction, "depth_fraction must lie in [0,1]");
  }
  ScheduleManifest m;
  m.num_steps = num_steps;
  m.depth_fraction = depth_fraction;
  m.depth_steps = depth_step_count(num_steps, depth_fraction);
  m.entries.reserve(static_cast<std::size_t>(num_steps));
  for (int k = 0; k < num_steps; ++k) {
    ScheduleEntry e;
    e.step = k;
    e.t = num_steps > 1 ? static_cast<double>(k) / static_cast<double>(num_steps - 1) : 0.0;
    e.condition = k < m.depth_steps ? Condition::PoseDepth : Condition::Pose;
    e.frames = std::string(sequence_directory(e.condition));
    m.entries.push_back(std::move(e));
  }
  if (m.depth_steps > 0) m.t_stop = m.entries[static_cast<std::size_t>(m.depth_steps - 1)].t;
  return m;
}

Condition condition_at(const ScheduleManifest& manifest, int step) {
  if (step < 0 || step >= manifest.num_steps) {
    throw Error(ErrorCode::StepOutOfRange, "step " + std::to_string(step) + " outside [0, " +
                                               std::to_string(manifest.num_steps) + ")");
  }
  return manifest.entries[static_cast<std::size_t>(step)].condition;
}

}  // namespace camcond::schedule
