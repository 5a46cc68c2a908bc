#include "camcond/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <map>
#include <string>

#include "camcond/error.hpp"
#include "camcond/scene_transfer.hpp"

namespace camcond::pipeline {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  const auto start = std::chrono::steady_clock::now();
  auto done = [&] {
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    spdlog::info("stage={} ms={:.2f}", name, ms);
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      done();
    } else {
      auto result = fn();
      done();
      return result;
    }
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + name + ": " + e.detail());
  }
}

void require_shape(const depthmesh::DepthRaster& d, const geom::CameraFrame& cam, const char* what) {
  if (d.width() != cam.width || d.height() != cam.height) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " is " + std::to_string(d.width()) + "x" + std::to_string(d.height()) +
                    " but the reference camera is " + std::to_string(cam.width) + "x" + std::to_string(cam.height));
  }
}

/// Reference keypoints in skeleton joint order, 2D detections lifted through
/// the transferred character points at their pixel.
std::pair<std::vector<geom::Point3>, std::vector<std::uint8_t>> reference_points(
    const io::ReferenceKeypoints& kp, const motion::Skeleton& skeleton,
    const transfer::CharacterPoints& character) {
  const std::size_t n = kp.is_2d() ? kp.pixels.size() : kp.points.size();
  std::vector<int> source(skeleton.joints.size(), -1);
  if (kp.joints.empty()) {
    if (n != skeleton.joints.size()) {
      throw Error(ErrorCode::ShapeMismatch, "reference keypoints list " + std::to_string(n) + " entries, skeleton has " +
                                                std::to_string(skeleton.joints.size()) + " joints");
    }
    for (std::size_t j = 0; j < n; ++j) source[j] = static_cast<int>(j);
  } else {
    for (std::size_t j = 0; j < skeleton.joints.size(); ++j) {
      const auto it = std::find(kp.joints.begin(), kp.joints.end(), skeleton.joints[j]);
      if (it != kp.joints.end()) source[j] = static_cast<int>(it - kp.joints.begin());
    }
  }

  std::map<std::pair<int, int>, std::size_t> by_pixel;
  if (kp.is_2d()) {
    for (std::size_t i = 0; i < character.pixels.size(); ++i) {
      by_pixel.emplace(std::make_pair(character.pixels[i][0], character.pixels[i][1]), i);
    }
  }

  std::vector<geom::Point3> points(skeleton.joints.size(), geom::Point3::Zero());
  std::vector<std::uint8_t> valid(skeleton.joints.size(), 0);
  for (std::size_t j = 0; j < skeleton.joints.size(); ++j) {
    const int s = source[j];
    if (s < 0 || !kp.valid[static_cast<std::size_t>(s)]) continue;
    if (!kp.is_2d()) {
      points[j] = kp.points[static_cast<std::size_t>(s)];
      valid[j] = 1;
      continue;
    }
    const geom::Vec2& px = kp.pixels[static_cast<std::size_t>(s)];
    const auto it = by_pixel.find({static_cast<int>(std::floor(px.x())), static_cast<int>(std::floor(px.y()))});
    if (it == by_pixel.end()) {
      spdlog::warn("keypoint '{}' at ({}, {}) has no character depth; excluded from the fit",
                   skeleton.joints[j], px.x(), px.y());
      continue;
    }
    points[j] = character.points[it->second];
    valid[j] = 1;
  }
  return {points, valid};
}

}  // namespace

Scene prepare_scene(const io::ProjectBundle& bundle, const trajectory::TrajectorySpec& traj, int threads) {
  Scene scene;
  scene.parameters = bundle.parameters;
  const auto cameras = stage("expand_reference", [&] { return trajectory::expand(traj); });
  scene.reference_camera = cameras.front();
  if (!geom::principal_point_inside(scene.reference_camera)) {
    spdlog::warn("principal point lies outside the reference image");
  }

  auto d_bg = stage("read_background_depth", [&] { return io::read_depth(bundle.background_depth); });
  const auto d_ref = stage("read_reference_depth", [&] { return io::read_depth(bundle.reference_depth); });
  const auto mask = stage("read_mask", [&] { return io::read_mask(bundle.mask); });
  const auto raw_motion = stage("read_motion", [&] { return io::read_motion(bundle.motion); });
  std::optional<io::ReferenceKeypoints> keypoints;
  if (bundle.reference_keypoints) {
    keypoints = stage("read_keypoints", [&] { return io::read_keypoints(*bundle.reference_keypoints); });
  }

  stage("check_inputs", [&] {
    require_shape(d_bg, scene.reference_camera, "background depth");
    require_shape(d_ref, scene.reference_camera, "reference depth");
    if (mask.width != d_bg.width() || mask.height != d_bg.height()) {
      throw Error(ErrorCode::DimensionMismatch, "mask size differs from the depth rasters");
    }
    transfer::validate_character_mask(mask);
  });

  if (bundle.parameters.fill_holes) {
    d_bg = stage("fill_holes", [&] { return depthmesh::fill_holes(d_bg, mask); });
  }
  scene.mesh = stage("build_mesh", [&] {
    return depthmesh::build_mesh(d_bg, scene.reference_camera, bundle.parameters.discontinuity_ratio, threads);
  });
  spdlog::info("mesh vertices={} triangles={}", scene.mesh.vertices.size(), scene.mesh.triangles.size());

  const auto params = stage("weighted_centroids", [&] {
    return transfer::weighted_centroids(d_ref, d_bg, scene.reference_camera, mask, bundle.parameters.decay_length);
  });
  spdlog::info("centroid z ref={:.6f} bg={:.6f} pixels={}", params.p_ref.z(), params.p_bg.z(),
               params.contributing_pixels);
  const auto character = stage("transfer_character", [&] {
    return transfer::transfer_character(d_ref, d_bg, scene.reference_camera, mask, bundle.parameters.decay_length);
  });
  scene.character_points = character.points.size();

  if (keypoints) {
    const auto fit = stage("fit_to_reference", [&] {
      const auto [points, valid] = reference_points(*keypoints, raw_motion.skeleton, character);
      return motion::fit_to_reference(raw_motion, points, valid);
    });
    scene.motion = fit.motion;
    scene.fit = fit.transform;
    scene.fit_rms = fit.frame0_rms;
    spdlog::info("fit scale={:.6f} frame0_rms={:.3e}", fit.transform.scale, fit.frame0_rms);
  } else {
    scene.motion = raw_motion;
    spdlog::info("no reference keypoints; motion used in world coordinates as given");
  }

  scene.style = stage("style", [&] {
    auto style = io::apply_overrides(raster::body18_style(), bundle.style);
    if (scene.motion.skeleton.limbs != style.limbs || scene.motion.num_joints() > 18) {
      const auto& palette = raster::body18_palette();
      style.limbs = scene.motion.skeleton.limbs;
      style.limb_colors.clear();
      style.joint_colors.clear();
      for (std::size_t i = 0; i < style.limbs.size(); ++i) style.limb_colors.push_back(palette[i % palette.size()]);
      for (int j = 0; j < scene.motion.num_joints(); ++j) {
        style.joint_colors.push_back(palette[static_cast<std::size_t>(j) % palette.size()]);
      }
    }
    raster::validate(style, scene.motion.num_joints());
    return style;
  });
  return scene;
}

raster::RenderedSequence render(const Scene& scene, const trajectory::TrajectorySpec& traj, int threads) {
  const auto cameras = stage("expand_trajectory", [&] { return trajectory::expand(traj); });
  return stage("render_sequence", [&] {
    raster::SequenceOptions opts;
    opts.threads = threads;
    opts.polarity = scene.parameters.polarity;
    return raster::render_sequence(scene.mesh, scene.motion, cameras, scene.style, opts);
  });
}

CompileResult compile(const io::ProjectBundle& bundle, int threads) {
  CompileResult result;
  result.manifest_path = bundle.output / "manifest.json";
  std::error_code ec;
  fs::remove(result.manifest_path, ec);

  stage("validate_bundle", [&] { io::validate(bundle); });
  const auto traj = stage("read_trajectory", [&] { return io::read_trajectory(bundle.trajectory); });
  const Scene scene = prepare_scene(bundle, traj, threads);
  const auto rendered = render(scene, traj, threads);
  spdlog::info("depth range min={:.6f} max={:.6f}", rendered.range.min, rendered.range.max);

  result.manifest = stage("build_schedule", [&] {
    return schedule::build_schedule(bundle.parameters.num_steps, bundle.parameters.depth_fraction);
  });
  stage("write_frames", [&] {
    result.pose = io::write_frame_sequence(bundle.output / schedule::sequence_directory(schedule::Condition::Pose),
                                           "pose", rendered.pose);
    result.pose_depth = io::write_frame_sequence(
        bundle.output / schedule::sequence_directory(schedule::Condition::PoseDepth), "pose+depth",
        rendered.pose_depth);
  });
  stage("write_manifest", [&] { io::write_manifest(result.manifest, result.manifest_path); });
  spdlog::info("wrote {}", result.manifest_path.string());
  return result;
}

std::string output_digest(const fs::path& output_dir) {
  std::string joined;
  for (const char* rel : {"manifest.json", "c_pose/index.json", "c_pose_depth/index.json"}) {
    const auto bytes = io::read_file(output_dir / rel);
    joined += rel;
    joined += '\n';
    joined += io::sha256_hex(bytes);
    joined += '\n';
  }
  return io::sha256_hex(joined);
}

}  // namespace camcond::pipeline
