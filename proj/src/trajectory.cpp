#include "camcond/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "camcond/error.hpp"

namespace camcond::trajectory {

std::string_view to_string(PresetKind kind) noexcept {
  switch (kind) {
    case PresetKind::Orbit: return "orbit";
    case PresetKind::Dolly: return "dolly";
    case PresetKind::Truck: return "truck";
    case PresetKind::Zoom: return "zoom";
  }
  return "unknown";
}

PresetKind preset_kind_from_string(std::string_view s) {
  if (s == "orbit") return PresetKind::Orbit;
  if (s == "dolly") return PresetKind::Dolly;
  if (s == "truck") return PresetKind::Truck;
  if (s == "zoom") return PresetKind::Zoom;
  throw Error(ErrorCode::InvalidSpec, "unknown preset kind '" + std::string(s) + "'");
}

namespace {

void check_camera(const geom::CameraFrame& cam, const std::string& where) {
  try {
    geom::validate(cam);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidSpec, where + ": " + e.detail());
  }
}

}  // namespace

void validate(const TrajectorySpec& spec) {
  if (spec.mode == TrajectorySpec::Mode::Preset) {
    const Preset& p = spec.preset;
    check_camera(spec.base, "base");
    if (p.frames < 1) throw Error(ErrorCode::InvalidSpec, "preset.frames must be >= 1");
    if (!std::isfinite(p.magnitude)) throw Error(ErrorCode::InvalidSpec, "preset.magnitude must be finite");
    if (!p.anchor.allFinite()) throw Error(ErrorCode::InvalidSpec, "preset.anchor must be finite");
    if (p.kind == PresetKind::Zoom && !(p.magnitude > 0.0)) {
      throw Error(ErrorCode::InvalidSpec, "zoom multiplier must be > 0");
    }
    if (p.kind == PresetKind::Orbit && !(p.up.norm() > 0.0 && p.up.allFinite())) {
      throw Error(ErrorCode::InvalidSpec, "orbit up axis must be a non-zero vector");
    }
    return;
  }

  if (spec.num_frames < 1) throw Error(ErrorCode::InvalidSpec, "frames must be >= 1");
  if (spec.keyframes.empty()) throw Error(ErrorCode::InvalidSpec, "keyframes list is empty");
  if (spec.keyframes.front().index != 0) {
    throw Error(ErrorCode::InvalidSpec, "first keyframe must be at frame 0");
  }
  if (spec.keyframes.back().index != spec.num_frames - 1) {
    throw Error(ErrorCode::InvalidSpec, "last keyframe must be at frame " +
                                            std::to_string(spec.num_frames - 1));
  }
  const auto& first = spec.keyframes.front().camera;
  for (std::size_t i = 0; i < spec.keyframes.size(); ++i) {
    const auto& kf = spec.keyframes[i];
    check_camera(kf.camera, "keyframes[" + std::to_string(i) + "]");
    if (i > 0 && kf.index <= spec.keyframes[i - 1].index) {
      throw Error(ErrorCode::InvalidSpec, "keyframe indices must be strictly increasing");
    }
    if (kf.camera.width != first.width || kf.camera.height != first.height) {
      throw Error(ErrorCode::InvalidSpec, "keyframes must share one image size");
    }
  }
}

int frame_count(const TrajectorySpec& spec) {
  return spec.mode == TrajectorySpec::Mode::Preset ? spec.preset.frames : spec.num_frames;
}

std::vector<geom::CameraFrame> expand_preset(const Preset& preset, const geom::CameraFrame& base) {
  const int t = preset.frames;
  std::vector<geom::CameraFrame> out;
  out.reserve(static_cast<std::size_t>(t));
  out.push_back(base);

  const geom::Mat3 r = base.extrinsics.rotation_matrix();
  const geom::Vec3 center = base.extrinsics.center();
  for (int i = 1; i < t; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(t - 1);
    geom::CameraFrame cam = base;
    switch (preset.kind) {
      case PresetKind::Orbit: {
        if (preset.magnitude == 0.0) break;
        const double angle = preset.magnitude * std::numbers::pi / 180.0 * s;
        const geom::Quat q(Eigen::AngleAxisd(angle, preset.up.normalized()));
        const geom::Vec3 c = preset.anchor + q.toRotationMatrix() * (center - preset.anchor);
        cam.extrinsics.rotation = (base.extrinsics.rotation * q.conjugate()).normalized();
        cam.extrinsics.translation = -(cam.extrinsics.rotation_matrix() * c);
        break;
      }
      case PresetKind::Dolly:
      case PresetKind::Truck: {
        const geom::Vec3 axis =
            preset.kind == PresetKind::Dolly ? r.row(2).transpose() : r.row(0).transpose();
        const geom::Vec3 delta = preset.magnitude * s * axis;
        cam.extrinsics.translation = base.extrinsics.translation - r * delta;
        break;
      }
      case PresetKind::Zoom: {
        const double factor = 1.0 + (preset.magnitude - 1.0) * s;
        cam.intrinsics.fx = base.intrinsics.fx * factor;
        cam.intrinsics.fy = base.intrinsics.fy * factor;
        break;
      }
    }
    out.push_back(cam);
  }
  return out;
}

std::vector<geom::CameraFrame> expand(const TrajectorySpec& spec) {
  validate(spec);
  if (spec.mode == TrajectorySpec::Mode::Preset) return expand_preset(spec.preset, spec.base);

  std::vector<geom::CameraFrame> out;
  out.reserve(static_cast<std::size_t>(spec.num_frames));
  std::size_t seg = 0;
  for (int i = 0; i < spec.num_frames; ++i) {
    while (seg + 1 < spec.keyframes.size() && spec.keyframes[seg + 1].index <= i) ++seg;
    const Keyframe& a = spec.keyframes[seg];
    if (a.index == i || seg + 1 == spec.keyframes.size()) {
      out.push_back(a.camera);
      continue;
    }
    const Keyframe& b = spec.keyframes[seg + 1];
    const double alpha = static_cast<double>(i - a.index) / static_cast<double>(b.index - a.index);
    geom::CameraFrame cam = a.camera;
    cam.extrinsics = geom::interpolate_pose(a.camera.extrinsics, b.camera.extrinsics, alpha);
    auto lerp = [alpha](double x, double y) { return (1.0 - alpha) * x + alpha * y; };
    cam.intrinsics.fx = lerp(a.camera.intrinsics.fx, b.camera.intrinsics.fx);
    cam.intrinsics.fy = lerp(a.camera.intrinsics.fy, b.camera.intrinsics.fy);
    cam.intrinsics.cx = lerp(a.camera.intrinsics.cx, b.camera.intrinsics.cx);
    cam.intrinsics.cy = lerp(a.camera.intrinsics.cy, b.camera.intrinsics.cy);
    out.push_back(cam);
  }
  return out;
}

std::vector<TrajectorySpec> default_presets(const geom::CameraFrame& base,
                                            const geom::Point3& anchor, int frames) {
  const double distance = (base.extrinsics.center() - anchor).norm();
  auto make = [&](PresetKind kind, double magnitude) {
    TrajectorySpec spec;
    spec.mode = TrajectorySpec::Mode::Preset;
    spec.base = base;
    spec.preset.kind = kind;
    spec.preset.magnitude = magnitude;
    spec.preset.anchor = anchor;
    spec.preset.frames = frames;
    return spec;
  };
  return {make(PresetKind::Orbit, 30.0), make(PresetKind::Orbit, -30.0),
          make(PresetKind::Dolly, 0.3 * distance), make(PresetKind::Zoom, 1.5)};
}

}  // namespace camcond::trajectory
