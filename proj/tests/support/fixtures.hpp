#pragma once

#include <filesystem>
#include <random>
#include <vector>

#include "camcond/depthmesh.hpp"
#include "camcond/geom.hpp"
#include "camcond/image.hpp"
#include "camcond/io_formats.hpp"
#include "camcond/motion_fit.hpp"
#include "camcond/trajectory.hpp"

namespace camcond::fixtures {

namespace fs = std::filesystem;

/// 64x64 pinhole at the origin looking down +z, image rows along +y.
geom::CameraFrame camera64();

/// Body-18 walking cycle in a y-up frame centered near the origin.
motion::MotionSequence walking_motion(int frames);

/// The same cycle placed upright in the camera frame at `depth` meters.
motion::MotionSequence standing_motion_in_view(int frames, double depth);

struct SceneInputs {
  depthmesh::DepthRaster background;
  depthmesh::DepthRaster reference;
  Mask mask;
  motion::MotionSequence motion;
  trajectory::TrajectorySpec trajectory;
  std::optional<io::ReferenceKeypoints> keypoints;
  io::BundleParameters parameters;
};

/// Back wall, a box in front of it, and a character standing between; the
/// reference depth is the background scaled by 0.9; 2D keypoints drive the
/// motion fit; dolly-in over 8 frames.
SceneInputs golden_scene();

/// Fronto-parallel plane at 3 m, character motion already in world
/// coordinates, dolly-in by `dolly` meters over `frames` frames.
SceneInputs plane_scene(int frames, double dolly);

/// Writes every input plus bundle.json (relative paths, output "out") and
/// returns the bundle path.
fs::path write_scene(const SceneInputs& scene, const fs::path& dir);

/// Fresh empty directory under the system temp dir.
fs::path temp_dir(const std::string& tag);

Mask random_mask(std::mt19937_64& rng, int width, int height);

/// Up to `max_triangles` random triangles in front of `cam`, some
/// overlapping, some partially off-screen.
depthmesh::SceneMesh random_mesh(std::mt19937_64& rng, const geom::CameraFrame& cam, int max_triangles);

geom::Quat random_rotation(std::mt19937_64& rng);

}  // namespace camcond::fixtures
