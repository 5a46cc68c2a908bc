#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "camcond/depthmesh.hpp"
#include "camcond/io_formats.hpp"
#include "camcond/motion_fit.hpp"
#include "camcond/raster.hpp"
#include "camcond/schedule.hpp"
#include "camcond/trajectory.hpp"

namespace camcond::pipeline {

/// Trajectory-independent assets: everything cmd_compile derives before the
/// camera path is expanded. Shared read-only by the preview service.
struct Scene {
  geom::CameraFrame reference_camera;
  depthmesh::SceneMesh mesh;
  motion::MotionSequence motion;
  raster::SkeletonStyle style;
  io::BundleParameters parameters;
  std::optional<motion::SimilarityTransform> fit;
  double fit_rms = 0.0;
  std::size_t character_points = 0;
};

/// The reference view is frame 0 of `trajectory`. Stage failures are
/// rethrown with the stage name prefixed.
Scene prepare_scene(const io::ProjectBundle& bundle, const trajectory::TrajectorySpec& trajectory,
                    int threads);

raster::RenderedSequence render(const Scene& scene, const trajectory::TrajectorySpec& trajectory,
                                int threads);

struct CompileResult {
  std::filesystem::path manifest_path;
  schedule::ScheduleManifest manifest;
  io::FrameSequenceIndex pose;
  io::FrameSequenceIndex pose_depth;
};

/// Output tree: c_pose/, c_pose_depth/ (numbered frames + index.json) and
/// manifest.json, written last. A failed run leaves no manifest behind.
CompileResult compile(const io::ProjectBundle& bundle, int threads);

/// Digest over the manifest and index documents of an output tree, in a
/// fixed order. Equal trees give equal digests.
std::string output_digest(const std::filesystem::path& output_dir);

}  // namespace camcond::pipeline
