// Structured-text documents: cameras, motion, keypoints, trajectories,
// manifests, frame indices and correspondence lists.

#include <algorithm>
#include <cmath>
#include <string>

#include "camcond/error.hpp"
#include "camcond/io_formats.hpp"
#include "json_access.hpp"

namespace camcond::io {

using detail::array_of;
using detail::boolean;
using detail::fail;
using detail::field;
using detail::integer;
using detail::number;
using detail::string_of;

Json parse_json(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, what + ": not valid JSON (" + e.what() + ")");
  }
}

Json read_json(const fs::path& path) {
  const auto bytes = read_file(path);
  return parse_json(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                    path.string());
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void detail::check_version(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const int v = integer(field(j, "version", path), path + ".version");
  if (v != kSchemaVersion) {
    fail(path + ".version", "unsupported version " + std::to_string(v));
  }
}

namespace {

Json vec_json(const geom::Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

geom::Vec3 vec3(const Json& j, const std::string& path) {
  const Json& a = array_of(j, path, 3);
  return {number(a[0], path + "[0]"), number(a[1], path + "[1]"), number(a[2], path + "[2]")};
}

geom::Vec2 vec2(const Json& j, const std::string& path) {
  const Json& a = array_of(j, path, 2);
  return {number(a[0], path + "[0]"), number(a[1], path + "[1]")};
}

geom::Quat quaternion(const Json& j, const std::string& path) {
  const Json& a = array_of(j, path, 4);
  geom::Quat q(number(a[0], path + "[0]"), number(a[1], path + "[1]"), number(a[2], path + "[2]"),
               number(a[3], path + "[3]"));
  if (std::abs(q.norm() - 1.0) >= 1e-6) fail(path, "quaternion is not unit length");
  return q.normalized();
}

template <typename Fn>
auto guarded(const std::string& what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, what + ": " + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Cameras

Json camera_to_json(const geom::CameraFrame& cam) {
  const auto& q = cam.extrinsics.rotation;
  return Json{{"width", cam.width},
              {"height", cam.height},
              {"intrinsics",
               {{"fx", cam.intrinsics.fx}, {"fy", cam.intrinsics.fy}, {"cx", cam.intrinsics.cx}, {"cy", cam.intrinsics.cy}}},
              {"rotation", Json::array({q.w(), q.x(), q.y(), q.z()})},
              {"translation", vec_json(cam.extrinsics.translation)}};
}

geom::CameraFrame camera_from_json(const Json& j, bool camera_to_world, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a camera object");
  geom::CameraFrame cam;
  cam.width = integer(field(j, "width", path), path + ".width");
  cam.height = integer(field(j, "height", path), path + ".height");
  const std::string ip = path + ".intrinsics";
  const Json& in = field(j, "intrinsics", path);
  cam.intrinsics.fx = number(field(in, "fx", ip), ip + ".fx");
  cam.intrinsics.fy = number(field(in, "fy", ip), ip + ".fy");
  cam.intrinsics.cx = number(field(in, "cx", ip), ip + ".cx");
  cam.intrinsics.cy = number(field(in, "cy", ip), ip + ".cy");
  const geom::Quat q = quaternion(field(j, "rotation", path), path + ".rotation");
  const geom::Vec3 t = vec3(field(j, "translation", path), path + ".translation");
  cam.extrinsics = camera_to_world ? geom::from_camera_to_world(q, t) : geom::make_extrinsics(q, t);
  try {
    geom::validate(cam);
  } catch (const Error& e) {
    fail(path, e.detail());
  }
  return cam;
}

// ---------------------------------------------------------------------------
// Motion

Json motion_to_json(const motion::MotionSequence& seq) {
  Json limbs = Json::array();
  for (const auto& l : seq.skeleton.limbs) limbs.push_back(Json::array({l[0], l[1]}));
  Json frames = Json::array();
  for (const auto& f : seq.frames) {
    Json joints = Json::array();
    for (const auto& p : f) joints.push_back(vec_json(p));
    frames.push_back(std::move(joints));
  }
  Json j{{"version", kSchemaVersion},
         {"skeleton",
          {{"name", seq.skeleton.name}, {"joints", seq.skeleton.joints}, {"limbs", limbs}, {"root", seq.skeleton.root}}},
         {"fps", seq.fps},
         {"frames", frames}};
  if (!seq.valid.empty()) {
    Json valid = Json::array();
    for (const auto& row : seq.valid) {
      Json r = Json::array();
      for (auto v : row) r.push_back(v != 0);
      valid.push_back(std::move(r));
    }
    j["valid"] = std::move(valid);
  }
  return j;
}

motion::MotionSequence motion_from_json(const Json& j) {
  return guarded("motion", [&] {
    detail::check_version(j, "motion");
    motion::MotionSequence seq;
    const Json& sk = field(j, "skeleton", "motion");
    if (!sk.is_object()) fail("motion.skeleton", "expected an object");
    seq.skeleton.name = sk.contains("name") ? string_of(sk["name"], "motion.skeleton.name") : std::string();
    const Json& names = array_of(field(sk, "joints", "motion.skeleton"), "motion.skeleton.joints");
    for (std::size_t i = 0; i < names.size(); ++i) {
      seq.skeleton.joints.push_back(string_of(names[i], "motion.skeleton.joints[" + std::to_string(i) + "]"));
    }
    const Json& limbs = array_of(field(sk, "limbs", "motion.skeleton"), "motion.skeleton.limbs");
    for (std::size_t i = 0; i < limbs.size(); ++i) {
      const std::string lp = "motion.skeleton.limbs[" + std::to_string(i) + "]";
      const Json& l = array_of(limbs[i], lp, 2);
      seq.skeleton.limbs.push_back({integer(l[0], lp + "[0]"), integer(l[1], lp + "[1]")});
    }
    seq.skeleton.root = sk.contains("root") ? integer(sk["root"], "motion.skeleton.root") : 0;
    seq.fps = number(field(j, "fps", "motion"), "motion.fps");
    if (!(seq.fps > 0.0)) fail("motion.fps", "must be > 0");

    const Json& frames = array_of(field(j, "frames", "motion"), "motion.frames");
    const std::size_t jcount = seq.skeleton.joints.size();
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const std::string fp = "frames[" + std::to_string(f) + "]";
      if (!frames[f].is_array()) fail(fp, "expected an array of joints");
      if (frames[f].size() != jcount) {
        fail(fp, "expected " + std::to_string(jcount) + " joints, got " + std::to_string(frames[f].size()));
      }
      std::vector<geom::Point3> pts;
      pts.reserve(jcount);
      for (std::size_t k = 0; k < jcount; ++k) pts.push_back(vec3(frames[f][k], fp + "[" + std::to_string(k) + "]"));
      seq.frames.push_back(std::move(pts));
    }
    if (j.contains("valid")) {
      const Json& valid = array_of(j["valid"], "motion.valid", frames.size());
      for (std::size_t f = 0; f < valid.size(); ++f) {
        const std::string vp = "valid[" + std::to_string(f) + "]";
        const Json& row = array_of(valid[f], vp, jcount);
        std::vector<std::uint8_t> r;
        for (std::size_t k = 0; k < row.size(); ++k) r.push_back(boolean(row[k], vp + "[" + std::to_string(k) + "]"));
        seq.valid.push_back(std::move(r));
      }
    }
    motion::validate(seq);
    return seq;
  });
}

motion::MotionSequence read_motion(const fs::path& path) {
  try {
    return motion_from_json(read_json(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoFailure) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_motion(const motion::MotionSequence& seq, const fs::path& path) {
  write_text_atomic(path, dump_json(motion_to_json(seq)));
}

// ---------------------------------------------------------------------------
// Reference keypoints

ReferenceKeypoints keypoints_from_json(const Json& j) {
  return guarded("keypoints", [&] {
    detail::check_version(j, "keypoints");
    ReferenceKeypoints kp;
    const bool has_pixels = j.contains("pixels");
    const bool has_points = j.contains("points");
    if (has_pixels == has_points) fail("keypoints", "exactly one of 'pixels' or 'points' is required");
    std::size_t n = 0;
    if (has_pixels) {
      const Json& a = array_of(j["pixels"], "keypoints.pixels");
      for (std::size_t i = 0; i < a.size(); ++i) kp.pixels.push_back(vec2(a[i], "pixels[" + std::to_string(i) + "]"));
      n = a.size();
    } else {
      const Json& a = array_of(j["points"], "keypoints.points");
      for (std::size_t i = 0; i < a.size(); ++i) kp.points.push_back(vec3(a[i], "points[" + std::to_string(i) + "]"));
      n = a.size();
    }
    if (n == 0) fail("keypoints", "no keypoints");
    if (j.contains("joints")) {
      const Json& a = array_of(j["joints"], "keypoints.joints", n);
      for (std::size_t i = 0; i < a.size(); ++i) kp.joints.push_back(string_of(a[i], "joints[" + std::to_string(i) + "]"));
    }
    if (j.contains("valid")) {
      const Json& a = array_of(j["valid"], "keypoints.valid", n);
      for (std::size_t i = 0; i < a.size(); ++i) kp.valid.push_back(boolean(a[i], "valid[" + std::to_string(i) + "]"));
    } else {
      kp.valid.assign(n, 1);
    }
    return kp;
  });
}

ReferenceKeypoints read_keypoints(const fs::path& path) {
  try {
    return keypoints_from_json(read_json(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoFailure) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

Json keypoints_to_json(const ReferenceKeypoints& kp) {
  Json j{{"version", kSchemaVersion}};
  if (!kp.joints.empty()) j["joints"] = kp.joints;
  if (kp.is_2d()) {
    Json a = Json::array();
    for (const auto& p : kp.pixels) a.push_back(Json::array({p.x(), p.y()}));
    j["pixels"] = std::move(a);
  } else {
    Json a = Json::array();
    for (const auto& p : kp.points) a.push_back(vec_json(p));
    j["points"] = std::move(a);
  }
  Json v = Json::array();
  for (auto b : kp.valid) v.push_back(b != 0);
  j["valid"] = std::move(v);
  return j;
}

// ---------------------------------------------------------------------------
// Trajectories

Json trajectory_to_json(const trajectory::TrajectorySpec& spec) {
  Json j{{"version", kSchemaVersion}, {"convention", "world_to_camera"}};
  if (spec.mode == trajectory::TrajectorySpec::Mode::Preset) {
    j["mode"] = "preset";
    j["base"] = camera_to_json(spec.base);
    j["preset"] = {{"kind", std::string(trajectory::to_string(spec.preset.kind))},
                   {"magnitude", spec.preset.magnitude},
                   {"anchor", vec_json(spec.preset.anchor)},
                   {"frames", spec.preset.frames},
                   {"up", vec_json(spec.preset.up)}};
  } else {
    j["mode"] = "keyframes";
    j["frames"] = spec.num_frames;
    Json kfs = Json::array();
    for (const auto& kf : spec.keyframes) kfs.push_back({{"index", kf.index}, {"camera", camera_to_json(kf.camera)}});
    j["keyframes"] = std::move(kfs);
  }
  return j;
}

trajectory::TrajectorySpec trajectory_from_json(const Json& j) {
  return guarded("trajectory", [&] {
    detail::check_version(j, "trajectory");
    const std::string conv = string_of(field(j, "convention", "trajectory"), "trajectory.convention");
    if (conv != "world_to_camera" && conv != "camera_to_world") {
      fail("trajectory.convention", "must be 'world_to_camera' or 'camera_to_world'");
    }
    const bool c2w = conv == "camera_to_world";
    const std::string mode = string_of(field(j, "mode", "trajectory"), "trajectory.mode");
    trajectory::TrajectorySpec spec;
    if (mode == "preset") {
      spec.mode = trajectory::TrajectorySpec::Mode::Preset;
      spec.base = camera_from_json(field(j, "base", "trajectory"), c2w, "trajectory.base");
      const Json& p = field(j, "preset", "trajectory");
      if (!p.is_object()) fail("trajectory.preset", "expected an object");
      try {
        spec.preset.kind =
            trajectory::preset_kind_from_string(string_of(field(p, "kind", "trajectory.preset"), "trajectory.preset.kind"));
      } catch (const Error& e) {
        fail("trajectory.preset.kind", e.detail());
      }
      spec.preset.magnitude = number(field(p, "magnitude", "trajectory.preset"), "trajectory.preset.magnitude");
      spec.preset.frames = integer(field(p, "frames", "trajectory.preset"), "trajectory.preset.frames");
      if (p.contains("anchor")) spec.preset.anchor = vec3(p["anchor"], "trajectory.preset.anchor");
      if (p.contains("up")) spec.preset.up = vec3(p["up"], "trajectory.preset.up");
    } else if (mode == "keyframes") {
      spec.mode = trajectory::TrajectorySpec::Mode::Keyframes;
      spec.num_frames = integer(field(j, "frames", "trajectory"), "trajectory.frames");
      const Json& kfs = array_of(field(j, "keyframes", "trajectory"), "trajectory.keyframes");
      for (std::size_t i = 0; i < kfs.size(); ++i) {
        const std::string kp = "trajectory.keyframes[" + std::to_string(i) + "]";
        if (!kfs[i].is_object()) fail(kp, "expected an object");
        trajectory::Keyframe kf;
        kf.index = integer(field(kfs[i], "index", kp), kp + ".index");
        kf.camera = camera_from_json(field(kfs[i], "camera", kp), c2w, kp + ".camera");
        spec.keyframes.push_back(std::move(kf));
      }
    } else {
      fail("trajectory.mode", "must be 'preset' or 'keyframes'");
    }
    try {
      trajectory::validate(spec);
    } catch (const Error& e) {
      fail("trajectory", e.detail());
    }
    return spec;
  });
}

trajectory::TrajectorySpec read_trajectory(const fs::path& path) {
  try {
    return trajectory_from_json(read_json(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoFailure) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_trajectory(const trajectory::TrajectorySpec& spec, const fs::path& path) {
  write_text_atomic(path, dump_json(trajectory_to_json(spec)));
}

// ---------------------------------------------------------------------------
// Schedule manifest

Json manifest_to_json(const schedule::ScheduleManifest& m) {
  Json entries = Json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"step", e.step},
                       {"t", e.t},
                       {"condition", std::string(schedule::to_string(e.condition))},
                       {"frames", e.frames}});
  }
  return Json{{"version", kSchemaVersion},
              {"num_steps", m.num_steps},
              {"depth_fraction", m.depth_fraction},
              {"depth_steps", m.depth_steps},
              {"t_stop", m.t_stop ? Json(*m.t_stop) : Json(nullptr)},
              {"time_convention", "t=0 is the highest-noise step; t increases toward data"},
              {"entries", std::move(entries)}};
}

schedule::ScheduleManifest manifest_from_json(const Json& j) {
  return guarded("manifest", [&] {
    detail::check_version(j, "manifest");
    schedule::ScheduleManifest m;
    m.num_steps = integer(field(j, "num_steps", "manifest"), "manifest.num_steps");
    m.depth_fraction = number(field(j, "depth_fraction", "manifest"), "manifest.depth_fraction");
    m.depth_steps = integer(field(j, "depth_steps", "manifest"), "manifest.depth_steps");
    const Json& ts = field(j, "t_stop", "manifest");
    if (!ts.is_null()) m.t_stop = number(ts, "manifest.t_stop");
    const Json& entries = array_of(field(j, "entries", "manifest"), "manifest.entries");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const std::string ep = "manifest.entries[" + std::to_string(i) + "]";
      const Json& e = entries[i];
      if (!e.is_object()) fail(ep, "expected an object");
      schedule::ScheduleEntry entry;
      entry.step = integer(field(e, "step", ep), ep + ".step");
      entry.t = number(field(e, "t", ep), ep + ".t");
      try {
        entry.condition = schedule::condition_from_string(string_of(field(e, "condition", ep), ep + ".condition"));
      } catch (const Error& err) {
        fail(ep + ".condition", err.detail());
      }
      entry.frames = string_of(field(e, "frames", ep), ep + ".frames");
      m.entries.push_back(std::move(entry));
    }
    schedule::ScheduleManifest expected;
    try {
      expected = schedule::build_schedule(m.num_steps, m.depth_fraction);
    } catch (const Error& e) {
      fail("manifest", e.detail());
    }
    if (expected.depth_steps != m.depth_steps || expected.entries.size() != m.entries.size()) {
      fail("manifest", "entries inconsistent with num_steps and depth_fraction");
    }
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
      const auto& a = m.entries[i];
      const auto& b = expected.entries[i];
      if (a.step != b.step || a.condition != b.condition || a.t != b.t || a.frames != b.frames) {
        fail("manifest.entries[" + std::to_string(i) + "]", "does not follow the two-phase prefix rule");
      }
    }
    if (m.t_stop != expected.t_stop) fail("manifest.t_stop", "inconsistent with entries");
    return m;
  });
}

void write_manifest(const schedule::ScheduleManifest& manifest, const fs::path& path) {
  write_text_atomic(path, dump_json(manifest_to_json(manifest)));
}

schedule::ScheduleManifest read_manifest(const fs::path& path) {
  try {
    return manifest_from_json(read_json(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoFailure) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

// ---------------------------------------------------------------------------
// Frame sequences

std::string frame_file_name(int index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
  return "frame_" + digits + ".png";
}

FrameSequenceIndex write_frame_sequence(const fs::path& directory, std::string_view name,
                                        std::span<const Image> frames) {
  if (frames.empty()) throw Error(ErrorCode::InvalidArgument, "frame sequence is empty");
  FrameSequenceIndex index;
  index.sequence = std::string(name);
  index.width = frames.front().width;
  index.height = frames.front().height;
  index.channels = frames.front().channels;
  for (const auto& f : frames) {
    if (f.width != index.width || f.height != index.height || f.channels != index.channels) {
      throw Error(ErrorCode::DimensionMismatch, "frames of one sequence must share a shape");
    }
  }
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + directory.string());

  std::vector<std::string> keep;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string file = frame_file_name(static_cast<int>(i));
    write_file_atomic(directory / file, encode_png(frames[i]));
    index.files.push_back(file);
    index.pixel_sha256.push_back(sha256_hex(frames[i].pixels));
  }
  for (const auto& entry : fs::directory_iterator(directory, ec)) {
    const std::string fname = entry.path().filename().string();
    if (fname.starts_with("frame_") && fname.ends_with(".png") &&
        std::find(index.files.begin(), index.files.end(), fname) == index.files.end()) {
      fs::remove(entry.path(), ec);
    }
  }

  Json files = Json::array();
  for (std::size_t i = 0; i < index.files.size(); ++i) {
    files.push_back({{"file", index.files[i]}, {"pixel_sha256", index.pixel_sha256[i]}});
  }
  const Json j{{"version", kSchemaVersion}, {"sequence", index.sequence}, {"count", index.files.size()},
               {"width", index.width},      {"height", index.height},     {"channels", index.channels},
               {"frames", std::move(files)}};
  write_text_atomic(directory / "index.json", dump_json(j));
  return index;
}

FrameSequenceIndex read_frame_index(const fs::path& directory) {
  const fs::path path = directory / "index.json";
  const Json j = read_json(path);
  return guarded(path.string(), [&] {
    detail::check_version(j, "index");
    FrameSequenceIndex index;
    index.sequence = string_of(field(j, "sequence", "index"), "index.sequence");
    index.width = integer(field(j, "width", "index"), "index.width");
    index.height = integer(field(j, "height", "index"), "index.height");
    index.channels = integer(field(j, "channels", "index"), "index.channels");
    const int count = integer(field(j, "count", "index"), "index.count");
    const Json& frames = array_of(field(j, "frames", "index"), "index.frames", static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const std::string fp = "index.frames[" + std::to_string(i) + "]";
      index.files.push_back(string_of(field(frames[i], "file", fp), fp + ".file"));
      index.pixel_sha256.push_back(string_of(field(frames[i], "pixel_sha256", fp), fp + ".pixel_sha256"));
    }
    return index;
  });
}

// ---------------------------------------------------------------------------
// Correspondences

std::vector<MatchPair> matches_from_json(const Json& j) {
  return guarded("matches", [&] {
    detail::check_version(j, "matches");
    std::vector<MatchPair> out;
    const Json& pairs = array_of(field(j, "pairs", "matches"), "matches.pairs");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string pp = "matches.pairs[" + std::to_string(i) + "]";
      if (!pairs[i].is_object()) fail(pp, "expected an object");
      MatchPair mp;
      const Json& fr = array_of(field(pairs[i], "frames", pp), pp + ".frames", 2);
      mp.frame_a = integer(fr[0], pp + ".frames[0]");
      mp.frame_b = integer(fr[1], pp + ".frames[1]");
      if (mp.frame_a < 0 || mp.frame_b < 0) fail(pp + ".frames", "frame indices must be >= 0");
      const Json& ms = array_of(field(pairs[i], "matches", pp), pp + ".matches");
      for (std::size_t k = 0; k < ms.size(); ++k) {
        const std::string mp_path = pp + ".matches[" + std::to_string(k) + "]";
        const Json& m = array_of(ms[k], mp_path, 4);
        mp.matches.push_back({geom::Vec2(number(m[0], mp_path), number(m[1], mp_path)),
                              geom::Vec2(number(m[2], mp_path), number(m[3], mp_path))});
      }
      out.push_back(std::move(mp));
    }
    return out;
  });
}

std::vector<MatchPair> read_matches(const fs::path& path) {
  try {
    return matches_from_json(read_json(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoFailure) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

Json matches_to_json(std::span<const MatchPair> pairs) {
  Json arr = Json::array();
  for (const auto& p : pairs) {
    Json ms = Json::array();
    for (const auto& m : p.matches) ms.push_back(Json::array({m.x1.x(), m.x1.y(), m.x2.x(), m.x2.y()}));
    arr.push_back({{"frames", Json::array({p.frame_a, p.frame_b})}, {"matches", std::move(ms)}});
  }
  return Json{{"version", kSchemaVersion}, {"pairs", std::move(arr)}};
}

}  // namespace camcond::io
