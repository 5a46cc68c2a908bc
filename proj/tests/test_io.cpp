#include <doctest.h>

#include <cmath>
#include <cstring>
#include <functional>
#include <random>

#include "camcond/error.hpp"
#include "camcond/io_formats.hpp"
#include "support/fixtures.hpp"

using namespace camcond;
using depthmesh::DepthRaster;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }
std::string text_of(const std::vector<std::uint8_t>& b) { return {b.begin(), b.end()}; }

DepthRaster random_raster(std::mt19937_64& rng, int w, int h) {
  std::uniform_real_distribution<float> z(0.01f, 100.0f);
  std::bernoulli_distribution hole(0.1);
  DepthRaster d(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) d.set(x, y, hole(rng) ? std::nanf("") : z(rng));
  return d;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

std::vector<std::uint8_t> mutate(std::mt19937_64& rng, std::vector<std::uint8_t> b) {
  if (b.empty()) return b;
  const auto pick = [&] { return static_cast<std::size_t>(rng() % b.size()); };
  switch (rng() % 6) {
    case 0:
      b[pick()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
      break;
    case 1:
      b[pick()] = static_cast<std::uint8_t>(rng());
      break;
    case 2:
      b.resize(pick());
      break;
    case 3:
      b.insert(b.begin() + static_cast<std::ptrdiff_t>(pick()), static_cast<std::uint8_t>(rng()));
      break;
    case 4:
      b.erase(b.begin() + static_cast<std::ptrdiff_t>(pick()));
      break;
    default: {
      // Replace a digit with another digit or a structural character.
      static const char kSwap[] = "0123456789-.e,:[]{}\" ";
      for (int tries = 0; tries < 64; ++tries) {
        const auto i = pick();
        if (std::isdigit(b[i])) {
          b[i] = static_cast<std::uint8_t>(kSwap[rng() % (sizeof(kSwap) - 1)]);
          break;
        }
      }
    }
  }
  return b;
}

motion::MotionSequence random_motion(std::mt19937_64& rng) {
  auto seq = fixtures::walking_motion(1 + static_cast<int>(rng() % 5));
  std::normal_distribution<double> n(0.0, 10.0);
  for (auto& f : seq.frames)
    for (auto& p : f) p = geom::Point3(n(rng), n(rng), n(rng));
  if (rng() % 2) {
    seq.valid.assign(seq.frames.size(), std::vector<std::uint8_t>(18, 1));
    seq.valid[0][3] = 0;
  }
  seq.fps = 12.5;
  return seq;
}

bool same_motion(const motion::MotionSequence& a, const motion::MotionSequence& b) {
  return a.skeleton == b.skeleton && a.fps == b.fps && a.frames == b.frames && a.valid == b.valid;
}

// Fuzz contract: a mutated document is either rejected with a library error
// or decodes to a value that the writer reproduces and re-reads unchanged.
template <typename Decode, typename Reencode>
int fuzz(std::mt19937_64& rng, const std::vector<std::uint8_t>& clean, int rounds, Decode decode, Reencode reencode) {
  int rejected = 0;
  for (int i = 0; i < rounds; ++i) {
    const auto bad = mutate(rng, clean);
    try {
      const auto value = decode(bad);
      const auto again = reencode(value);
      CHECK(decode(again) == value);
    } catch (const Error& e) {
      CHECK(std::strlen(e.what()) > 0);
      ++rejected;
    }
  }
  return rejected;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("depth round trip is bit exact") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto d = random_raster(rng, 8, 8);
    CHECK(depthmesh::same_valid_values(io::decode_pfm(io::encode_pfm(d)), d));
  }
  const auto dir = fixtures::temp_dir("pfm");
  const auto d = random_raster(rng, 13, 7);
  io::write_depth(d, dir / "d.pfm");
  CHECK(depthmesh::same_valid_values(io::read_depth(dir / "d.pfm"), d));
}

TEST_CASE("NaN pixels decode as invalid") {
  DepthRaster d(3, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 3; ++x) d.set(x, y, 1.0f + static_cast<float>(x + 3 * y));
  d.invalidate(1, 1);
  const auto back = io::decode_pfm(io::encode_pfm(d));
  CHECK_FALSE(back.valid(1, 1));
  CHECK(back.valid_count() == 5);
  CHECK(back.at(2, 1) == 6.0f);
}

TEST_CASE("truncated or three-channel PFM is rejected") {
  std::mt19937_64 rng(2);
  auto bytes = io::encode_pfm(random_raster(rng, 8, 8));
  bytes.resize(bytes.size() - 3);
  CHECK(code_of([&] { (void)io::decode_pfm(bytes); }) == ErrorCode::MalformedHeader);
  CHECK(code_of([] { (void)io::decode_pfm(bytes_of("PF\n1 1\n-1.0\n0000")); }) == ErrorCode::NonFloatPayload);
  CHECK(code_of([] { (void)io::decode_pfm(bytes_of("Pf\n1 1\n")); }) == ErrorCode::MalformedHeader);
}

TEST_CASE("big-endian PFM is read") {
  std::string s = "Pf\n1 1\n1.0\n";
  s += std::string("\x40\x00\x00\x00", 4);  // 2.0f
  const auto d = io::decode_pfm(bytes_of(s));
  CHECK(d.at(0, 0) == 2.0f);
}

TEST_CASE("png and mask round trips") {
  Image rgb(5, 3, 3);
  for (std::size_t i = 0; i < rgb.pixels.size(); ++i) rgb.pixels[i] = static_cast<std::uint8_t>(i * 17);
  CHECK(io::decode_png(io::encode_png(rgb)) == rgb);
  CHECK(io::encode_png(rgb) == io::encode_png(rgb));

  std::mt19937_64 rng(3);
  const auto m = fixtures::random_mask(rng, 17, 9);
  const auto dir = fixtures::temp_dir("mask");
  io::write_mask(m, dir / "m.png");
  CHECK(io::read_mask(dir / "m.png") == m);

  std::string pgm = "P5\n3 1\n255\n";
  pgm += std::string("\x00\x80\x7f", 3);
  io::write_file_atomic(dir / "m.pgm", bytes_of(pgm));
  const auto pm = io::read_mask(dir / "m.pgm");
  CHECK(pm.bits == std::vector<std::uint8_t>{0, 1, 0});

  io::write_file_atomic(dir / "rgb.png", io::encode_png(rgb));
  CHECK(code_of([&] { (void)io::read_mask(dir / "rgb.png"); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("minimal motion file parses") {
  const std::string text = R"({"version":1,"fps":30,
    "skeleton":{"name":"body-18","root":1,"limbs":[[0,1]],
      "joints":["nose","neck","r-shoulder","r-elbow","r-wrist","l-shoulder","l-elbow","l-wrist","r-hip",
                "r-knee","r-ankle","l-hip","l-knee","l-ankle","r-eye","l-eye","r-ear","l-ear"]},
    "frames":[[[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],
               [0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0],[1,2,3]]]})";
  const auto seq = io::motion_from_json(io::parse_json(text, "motion"));
  CHECK(seq.num_frames() == 1);
  CHECK(seq.num_joints() == 18);
  CHECK(seq.frames[0][17] == geom::Point3(1, 2, 3));
}

TEST_CASE("short frame names its index") {
  auto j = io::motion_to_json(fixtures::walking_motion(4));
  j["frames"][2].erase(5);
  try {
    (void)io::motion_from_json(j);
    FAIL("expected SchemaViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
    CHECK(std::string(e.what()).find("frames[2]") != std::string::npos);
  }
}

TEST_CASE("motion serialization round trips") {
  std::mt19937_64 rng(4);
  const auto dir = fixtures::temp_dir("motion");
  for (int i = 0; i < 20; ++i) {
    const auto seq = random_motion(rng);
    io::write_motion(seq, dir / "m.json");
    CHECK(same_motion(io::read_motion(dir / "m.json"), seq));
  }
}

TEST_CASE("camera-to-world trajectories load as world-to-camera") {
  std::mt19937_64 rng(5);
  auto spec = fixtures::golden_scene().trajectory;
  spec.base.extrinsics = geom::make_extrinsics(fixtures::random_rotation(rng), geom::Vec3(0.3, -0.1, 2.0));
  auto w2c = io::trajectory_to_json(spec);
  auto c2w = w2c;
  const auto inv = spec.base.extrinsics.inverse();
  c2w["convention"] = "camera_to_world";
  c2w["base"]["rotation"] = {inv.rotation.w(), inv.rotation.x(), inv.rotation.y(), inv.rotation.z()};
  c2w["base"]["translation"] = {inv.translation.x(), inv.translation.y(), inv.translation.z()};
  const auto a = io::trajectory_from_json(w2c);
  const auto b = io::trajectory_from_json(c2w);
  const geom::Point3 p(0.2, 0.4, 5.0);
  const auto pa = geom::project(a.base, p);
  const auto pb = geom::project(b.base, p);
  CHECK(pa.u == doctest::Approx(pb.u).epsilon(1e-12));
  CHECK(pa.v == doctest::Approx(pb.v).epsilon(1e-12));
  CHECK(pa.depth == doctest::Approx(pb.depth).epsilon(1e-12));
}

TEST_CASE("trajectory documents round trip and require content") {
  const auto spec = fixtures::golden_scene().trajectory;
  const auto back = io::trajectory_from_json(io::trajectory_to_json(spec));
  CHECK(trajectory::expand(back) == trajectory::expand(spec));
  const auto dir = fixtures::temp_dir("traj");
  io::write_text_atomic(dir / "empty.json", "");
  CHECK(code_of([&] { (void)io::read_trajectory(dir / "empty.json"); }) == ErrorCode::SchemaViolation);
  io::write_text_atomic(dir / "obj.json", "{}");
  CHECK(code_of([&] { (void)io::read_trajectory(dir / "obj.json"); }) == ErrorCode::SchemaViolation);
  auto j = io::trajectory_to_json(spec);
  j.erase("convention");
  CHECK(code_of([&] { (void)io::trajectory_from_json(j); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("manifest for ten steps switches after the second entry") {
  const auto dir = fixtures::temp_dir("manifest");
  io::write_manifest(schedule::build_schedule(10, 0.2), dir / "manifest.json");
  const auto j = io::read_json(dir / "manifest.json");
  REQUIRE(j["entries"].size() == 10);
  for (int k = 0; k < 10; ++k) {
    CHECK(j["entries"][k]["condition"] == (k < 2 ? "pose+depth" : "pose"));
    CHECK(j["entries"][k]["frames"] == (k < 2 ? "c_pose_depth" : "c_pose"));
  }
  const auto m = io::read_manifest(dir / "manifest.json");
  CHECK(m.depth_steps == 2);
  auto bad = j;
  bad["entries"][2]["condition"] = "pose+depth";
  CHECK(code_of([&] { (void)io::manifest_from_json(bad); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("keypoints and matches round trip") {
  const auto kp = *fixtures::golden_scene().keypoints;
  const auto back = io::keypoints_from_json(io::keypoints_to_json(kp));
  CHECK(back.pixels == kp.pixels);
  CHECK(back.valid == kp.valid);
  io::MatchPair mp;
  mp.frame_a = 0;
  mp.frame_b = 3;
  mp.matches = {{{1.5, 2.5}, {3.25, 4.0}}};
  const std::vector<io::MatchPair> pairs{mp};
  const auto m = io::matches_from_json(io::matches_to_json(pairs));
  REQUIRE(m.size() == 1);
  CHECK(m[0].frame_b == 3);
  CHECK(m[0].matches[0].x2 == geom::Vec2(3.25, 4.0));
  auto both = io::keypoints_to_json(kp);
  both["points"] = io::Json::array();
  CHECK(code_of([&] { (void)io::keypoints_from_json(both); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("frame sequences write index and prune stale frames") {
  const auto dir = fixtures::temp_dir("frames");
  std::vector<Image> frames(3, Image(4, 4, 3));
  frames[1].pixels[0] = 9;
  io::write_frame_sequence(dir, "pose", frames);
  frames.pop_back();
  const auto idx = io::write_frame_sequence(dir, "pose", frames);
  CHECK_FALSE(fs::exists(dir / "frame_00002.png"));
  const auto back = io::read_frame_index(dir);
  CHECK(back.files == idx.files);
  CHECK(back.pixel_sha256[1] == io::sha256_hex(frames[1].pixels));
  CHECK(io::decode_png(io::read_file(dir / "frame_00001.png")) == frames[1]);
  CHECK(io::frame_file_name(12) == "frame_00012.png");
}

TEST_CASE("sha256 of the empty string") {
  CHECK(io::sha256_hex(std::string_view()) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("bundle resolves paths and validates") {
  const auto dir = fixtures::temp_dir("bundle");
  const auto path = fixtures::write_scene(fixtures::golden_scene(), dir);
  const auto b = io::read_bundle(path);
  CHECK(b.mask == dir / "mask.png");
  CHECK(b.output == dir / "out");
  CHECK_NOTHROW(io::validate(b));
  auto missing = b;
  missing.mask = dir / "nope.png";
  try {
    io::validate(missing);
    FAIL("expected IoFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoFailure);
    CHECK(std::string(e.what()).find("nope.png") != std::string::npos);
  }
  auto bad = b;
  bad.parameters.depth_fraction = 1.5;
  CHECK(code_of([&] { io::validate(bad); }) == ErrorCode::SchemaViolation);
  const auto again = io::bundle_from_json(io::bundle_to_json(b), dir);
  CHECK(again.motion == b.motion);
  CHECK(again.parameters.num_steps == b.parameters.num_steps);
}

TEST_CASE("mutated documents are rejected or reproduced") {
  std::mt19937_64 rng(2024);
  const auto scene = fixtures::golden_scene();

  int rejected = fuzz(
      rng, io::encode_pfm(scene.background), 1000,
      [](const std::vector<std::uint8_t>& b) {
        const auto d = io::decode_pfm(b);
        bool sane = true;
        for (int y = 0; y < d.height(); ++y)
          for (int x = 0; x < d.width(); ++x)
            if (d.valid(x, y)) sane = sane && std::isfinite(d.at(x, y)) && d.at(x, y) > 0.0f;
        REQUIRE(sane);
        return io::encode_pfm(d);
      },
      [](const std::vector<std::uint8_t>& b) { return b; });
  CHECK(rejected > 0);

  Image mask_img(64, 64, 1);
  for (std::size_t i = 0; i < mask_img.pixels.size(); ++i) mask_img.pixels[i] = scene.mask.bits[i] ? 255 : 0;
  rejected = fuzz(
      rng, io::encode_png(mask_img), 1000,
      [&](const std::vector<std::uint8_t>& b) {
        const auto m = io::decode_mask(b);
        Image img(m.width, m.height, 1);
        for (std::size_t i = 0; i < m.bits.size(); ++i) img.pixels[i] = m.bits[i] ? 255 : 0;
        return io::encode_png(img);
      },
      [](const std::vector<std::uint8_t>& b) { return b; });
  CHECK(rejected > 0);

  // Accepted documents must reach a canonical form in one write.
  auto canonical = [&](const io::Json& doc, auto decode, auto encode) {
    const std::string text = io::dump_json(doc);
    int rej = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto bad = mutate(rng, bytes_of(text));
      try {
        const std::string once = io::dump_json(encode(decode(io::parse_json(text_of(bad), "doc"))));
        const std::string twice = io::dump_json(encode(decode(io::parse_json(once, "doc"))));
        CHECK(once == twice);
      } catch (const Error&) {
        ++rej;
      }
    }
    return rej;
  };
  CHECK(canonical(io::motion_to_json(fixtures::walking_motion(2)), io::motion_from_json, io::motion_to_json) > 0);
  CHECK(canonical(io::trajectory_to_json(scene.trajectory), io::trajectory_from_json, io::trajectory_to_json) > 0);
  CHECK(canonical(io::manifest_to_json(schedule::build_schedule(10, 0.2)), io::manifest_from_json,
                  io::manifest_to_json) > 0);
  CHECK(canonical(io::keypoints_to_json(*scene.keypoints), io::keypoints_from_json, io::keypoints_to_json) > 0);
  io::MatchPair mp;
  mp.frame_b = 1;
  mp.matches = {{{1.5, 2.5}, {3.25, 4.0}}, {{7, 8}, {9, 10}}};
  const std::vector<io::MatchPair> pairs{mp};
  CHECK(canonical(io::matches_to_json(pairs), io::matches_from_json,
                  [](const std::vector<io::MatchPair>& p) { return io::matches_to_json(p); }) > 0);
}

}
