#pragma once

#include <string_view>
#include <vector>

#include "camcond/geom.hpp"

namespace camcond::trajectory {

enum class PresetKind { Orbit, Dolly, Truck, Zoom };

std::string_view to_string(PresetKind kind) noexcept;
PresetKind preset_kind_from_string(std::string_view s);

/// A parametric camera move with linear time parametrization. Units of
/// `magnitude`: orbit degrees (counter-clockwise about `up` seen from above),
/// dolly and truck meters, zoom a focal-length multiplier > 0.
struct Preset {
  PresetKind kind = PresetKind::Dolly;
  double magnitude = 0.0;
  geom::Point3 anchor = geom::Point3::Zero();
  int frames = 1;
  geom::Vec3 up = geom::Vec3::UnitY();
};

struct Keyframe {
  int index = 0;
  geom::CameraFrame camera;
};

struct TrajectorySpec {
  enum class Mode { Preset, Keyframes };

  Mode mode = Mode::Preset;
  /// Frame 0 of a preset trajectory.
  geom::CameraFrame base;
  Preset preset;
  /// Keyframe mode: T and keyframes with strictly increasing indices
  /// covering 0 and T-1.
  int num_frames = 1;
  std::vector<Keyframe> keyframes;
};

/// Throws InvalidSpec describing the first violated rule.
void validate(const TrajectorySpec& spec);

int frame_count(const TrajectorySpec& spec);

std::vector<geom::CameraFrame> expand_preset(const Preset& preset, const geom::CameraFrame& base);

/// Per-frame cameras. Frame 0 equals the base (or first keyframe) exactly;
/// keyframe mode reproduces every keyframe exactly and interpolates poses
/// with interpolate_pose and intrinsics linearly in between.
std::vector<geom::CameraFrame> expand(const TrajectorySpec& spec);

/// The default cinematic set: orbit left, orbit right, dolly in, zoom in.
std::vector<TrajectorySpec> default_presets(const geom::CameraFrame& base,
                                            const geom::Point3& anchor, int frames);

}  // namespace camcond::trajectory
