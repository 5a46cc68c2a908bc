#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "camcond/depthmesh.hpp"
#include "camcond/geom.hpp"
#include "camcond/image.hpp"
#include "camcond/metrics.hpp"
#include "camcond/motion_fit.hpp"
#include "camcond/raster.hpp"
#include "camcond/schedule.hpp"
#include "camcond/trajectory.hpp"

namespace camcond::io {

namespace fs = std::filesystem;
using Json = nlohmann::json;

/// Version written into, and required from, every structured-text document.
inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Raw bytes and digests

std::vector<std::uint8_t> read_file(const fs::path& path);
/// Writes via a sibling temporary file and rename, so readers never see a
/// partially written file.
void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const fs::path& path, std::string_view text);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

// ---------------------------------------------------------------------------
// Depth rasters: single-channel little-endian portable float map ("Pf",
// negative scale), rows stored bottom-to-top. Invalid pixels are written as
// NaN; on read every non-finite or non-positive value becomes invalid.

std::vector<std::uint8_t> encode_pfm(const depthmesh::DepthRaster& raster);
depthmesh::DepthRaster decode_pfm(std::span<const std::uint8_t> bytes);
depthmesh::DepthRaster read_depth(const fs::path& path);
void write_depth(const depthmesh::DepthRaster& raster, const fs::path& path);

// ---------------------------------------------------------------------------
// 8-bit images. PNG is written with fixed settings, so equal pixels give
// equal bytes.

std::vector<std::uint8_t> encode_png(const Image& image);
Image decode_png(std::span<const std::uint8_t> bytes);

/// Single-channel 8-bit PNG or binary PGM (P5); values > 127 are set.
Mask decode_mask(std::span<const std::uint8_t> bytes);
Mask read_mask(const fs::path& path);
void write_mask(const Mask& mask, const fs::path& path);

// ---------------------------------------------------------------------------
// Structured-text documents (JSON)

Json camera_to_json(const geom::CameraFrame& cam);
/// `camera_to_world` selects the convention of the rotation/translation
/// fields; the result is always world-to-camera.
geom::CameraFrame camera_from_json(const Json& j, bool camera_to_world, const std::string& path);

Json motion_to_json(const motion::MotionSequence& seq);
motion::MotionSequence motion_from_json(const Json& j);
motion::MotionSequence read_motion(const fs::path& path);
void write_motion(const motion::MotionSequence& seq, const fs::path& path);

/// Reference keypoints for the character fit: either 3D points or 2D pixel
/// detections to be lifted through the transferred character depth.
struct ReferenceKeypoints {
  std::vector<std::string> joints;
  std::vector<geom::Vec2> pixels;
  std::vector<geom::Point3> points;
  std::vector<std::uint8_t> valid;

  [[nodiscard]] bool is_2d() const { return !pixels.empty(); }
};
ReferenceKeypoints keypoints_from_json(const Json& j);
ReferenceKeypoints read_keypoints(const fs::path& path);
Json keypoints_to_json(const ReferenceKeypoints& kp);

enum class Convention { WorldToCamera, CameraToWorld };

Json trajectory_to_json(const trajectory::TrajectorySpec& spec);
trajectory::TrajectorySpec trajectory_from_json(const Json& j);
trajectory::TrajectorySpec read_trajectory(const fs::path& path);
void write_trajectory(const trajectory::TrajectorySpec& spec, const fs::path& path);

Json manifest_to_json(const schedule::ScheduleManifest& manifest);
schedule::ScheduleManifest manifest_from_json(const Json& j);
void write_manifest(const schedule::ScheduleManifest& manifest, const fs::path& path);
schedule::ScheduleManifest read_manifest(const fs::path& path);

/// Parses text as JSON, mapping syntax errors to SchemaViolation.
Json parse_json(std::string_view text, const std::string& what);
Json read_json(const fs::path& path);
/// Canonical serialization used by every writer: sorted keys, two-space
/// indent, trailing newline.
std::string dump_json(const Json& j);

// ---------------------------------------------------------------------------
// Numbered frame sequences: frame_00000.png, ... plus index.json listing each
// file with the SHA-256 of its raw pixels.

std::string frame_file_name(int index);

struct FrameSequenceIndex {
  std::string sequence;
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::string> files;
  std::vector<std::string> pixel_sha256;
};

FrameSequenceIndex write_frame_sequence(const fs::path& directory, std::string_view name,
                                        std::span<const Image> frames);
FrameSequenceIndex read_frame_index(const fs::path& directory);

// ---------------------------------------------------------------------------
// Correspondences for the epipolar metric.

struct MatchPair {
  int frame_a = 0;
  int frame_b = 0;
  std::vector<metrics::Match> matches;
};
std::vector<MatchPair> matches_from_json(const Json& j);
std::vector<MatchPair> read_matches(const fs::path& path);
Json matches_to_json(std::span<const MatchPair> pairs);

// ---------------------------------------------------------------------------
// Project bundle

struct BundleParameters {
  double decay_length = 1.0;
  double discontinuity_ratio = 0.05;
  double depth_fraction = 0.2;
  int num_steps = 50;
  bool fill_holes = false;
  raster::DepthPolarity polarity = raster::DepthPolarity::NearBright;
};

struct StyleOverrides {
  std::optional<double> limb_thickness;
  std::optional<double> joint_radius;
  std::optional<bool> draw_joints;
};

struct ProjectBundle {
  fs::path background_depth;
  fs::path reference_depth;
  fs::path mask;
  fs::path motion;
  fs::path trajectory;
  fs::path output;
  std::optional<fs::path> reference_keypoints;
  BundleParameters parameters;
  StyleOverrides style;
};

/// Relative paths resolve against `base_dir`.
ProjectBundle bundle_from_json(const Json& j, const fs::path& base_dir);
ProjectBundle read_bundle(const fs::path& path);
Json bundle_to_json(const ProjectBundle& bundle);

/// Checks parameter ranges and that every input file exists. Throws
/// SchemaViolation (ranges) or IoFailure (missing file, naming the path).
void validate(const ProjectBundle& bundle);

raster::SkeletonStyle apply_overrides(raster::SkeletonStyle style, const StyleOverrides& overrides);

}  // namespace camcond::io
