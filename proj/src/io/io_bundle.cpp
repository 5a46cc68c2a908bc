#include <cmath>
#include <string>

#include "camcond/error.hpp"
#include "camcond/io_formats.hpp"
#include "json_access.hpp"

namespace camcond::io {

using detail::boolean;
using detail::fail;
using detail::field;
using detail::integer;
using detail::number;
using detail::string_of;

namespace {

fs::path resolve(const Json& j, const char* key, const fs::path& base) {
  const fs::path p = string_of(field(j, key, "bundle"), std::string("bundle.") + key);
  if (p.empty()) fail(std::string("bundle.") + key, "empty path");
  return p.is_absolute() ? p : base / p;
}

std::string_view polarity_name(raster::DepthPolarity p) {
  return p == raster::DepthPolarity::NearBright ? "near_bright" : "far_bright";
}

}  // namespace

ProjectBundle bundle_from_json(const Json& j, const fs::path& base_dir) {
  try {
    detail::check_version(j, "bundle");
    ProjectBundle b;
    b.background_depth = resolve(j, "background_depth", base_dir);
    b.reference_depth = resolve(j, "reference_depth", base_dir);
    b.mask = resolve(j, "mask", base_dir);
    b.motion = resolve(j, "motion", base_dir);
    b.trajectory = resolve(j, "trajectory", base_dir);
    b.output = resolve(j, "output", base_dir);
    if (j.contains("reference_keypoints")) b.reference_keypoints = resolve(j, "reference_keypoints", base_dir);

    if (j.contains("parameters")) {
      const Json& p = j["parameters"];
      const std::string pp = "bundle.parameters";
      if (!p.is_object()) fail(pp, "expected an object");
      auto& bp = b.parameters;
      if (p.contains("decay_length")) bp.decay_length = number(p["decay_length"], pp + ".decay_length");
      if (p.contains("discontinuity_ratio")) {
        bp.discontinuity_ratio = number(p["discontinuity_ratio"], pp + ".discontinuity_ratio");
      }
      if (p.contains("depth_fraction")) bp.depth_fraction = number(p["depth_fraction"], pp + ".depth_fraction");
      if (p.contains("num_steps")) bp.num_steps = integer(p["num_steps"], pp + ".num_steps");
      if (p.contains("fill_holes")) bp.fill_holes = boolean(p["fill_holes"], pp + ".fill_holes");
      if (p.contains("depth_polarity")) {
        const std::string s = string_of(p["depth_polarity"], pp + ".depth_polarity");
        if (s == "near_bright") {
          bp.polarity = raster::DepthPolarity::NearBright;
        } else if (s == "far_bright") {
          bp.polarity = raster::DepthPolarity::FarBright;
        } else {
          fail(pp + ".depth_polarity", "must be 'near_bright' or 'far_bright'");
        }
      }
    }
    if (j.contains("style")) {
      const Json& s = j["style"];
      const std::string sp = "bundle.style";
      if (!s.is_object()) fail(sp, "expected an object");
      if (s.contains("limb_thickness")) b.style.limb_thickness = number(s["limb_thickness"], sp + ".limb_thickness");
      if (s.contains("joint_radius")) b.style.joint_radius = number(s["joint_radius"], sp + ".joint_radius");
      if (s.contains("draw_joints")) b.style.draw_joints = boolean(s["draw_joints"], sp + ".draw_joints");
    }
    return b;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("bundle: ") + e.what());
  }
}

ProjectBundle read_bundle(const fs::path& path) {
  const Json j = read_json(path);
  try {
    return bundle_from_json(j, path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

Json bundle_to_json(const ProjectBundle& b) {
  const auto& p = b.parameters;
  Json j{{"version", kSchemaVersion},
         {"background_depth", b.background_depth.string()},
         {"reference_depth", b.reference_depth.string()},
         {"mask", b.mask.string()},
         {"motion", b.motion.string()},
         {"trajectory", b.trajectory.string()},
         {"output", b.output.string()},
         {"parameters",
          {{"decay_length", p.decay_length},
           {"discontinuity_ratio", p.discontinuity_ratio},
           {"depth_fraction", p.depth_fraction},
           {"num_steps", p.num_steps},
           {"fill_holes", p.fill_holes},
           {"depth_polarity", std::string(polarity_name(p.polarity))}}}};
  if (b.reference_keypoints) j["reference_keypoints"] = b.reference_keypoints->string();
  Json style = Json::object();
  if (b.style.limb_thickness) style["limb_thickness"] = *b.style.limb_thickness;
  if (b.style.joint_radius) style["joint_radius"] = *b.style.joint_radius;
  if (b.style.draw_joints) style["draw_joints"] = *b.style.draw_joints;
  j["style"] = std::move(style);
  return j;
}

void validate(const ProjectBundle& b) {
  const auto& p = b.parameters;
  if (!(p.decay_length > 0.0)) fail("parameters.decay_length", "must be > 0");
  if (!(p.discontinuity_ratio > 0.0)) fail("parameters.discontinuity_ratio", "must be > 0");
  if (!(p.depth_fraction >= 0.0 && p.depth_fraction <= 1.0)) fail("parameters.depth_fraction", "must lie in [0,1]");
  if (p.num_steps < 1) fail("parameters.num_steps", "must be >= 1");
  if (b.style.limb_thickness && !(*b.style.limb_thickness > 0.0)) fail("style.limb_thickness", "must be > 0");
  if (b.style.joint_radius && !(*b.style.joint_radius >= 0.0)) fail("style.joint_radius", "must be >= 0");

  auto require = [](const fs::path& path, const char* what) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
      throw Error(ErrorCode::IoFailure, std::string(what) + " file not found: " + path.string());
    }
  };
  require(b.background_depth, "background depth");
  require(b.reference_depth, "reference depth");
  require(b.mask, "mask");
  require(b.motion, "motion");
  require(b.trajectory, "trajectory");
  if (b.reference_keypoints) require(*b.reference_keypoints, "reference keypoints");
  if (b.output.empty()) fail("output", "empty path");
}

raster::SkeletonStyle apply_overrides(raster::SkeletonStyle style, const StyleOverrides& o) {
  if (o.limb_thickness) style.limb_thickness = *o.limb_thickness;
  if (o.joint_radius) style.joint_radius = *o.joint_radius;
  if (o.draw_joints) style.draw_joints = *o.draw_joints;
  return style;
}

}  // namespace camcond::io
