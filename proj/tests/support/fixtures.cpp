#include "fixtures.hpp"

#include <atomic>
#include <cmath>
#include <string>
#include <unistd.h>

namespace camcond::fixtures {

geom::CameraFrame camera64() {
  geom::CameraFrame cam;
  cam.width = 64;
  cam.height = 64;
  cam.intrinsics = {60.0, 60.0, 32.0, 32.0};
  return cam;
}

namespace {

const std::vector<geom::Point3>& rest_pose() {
  static const std::vector<geom::Point3> pose{
      {0.0, 1.6, 0.05},    {0.0, 1.45, 0.0},    {-0.18, 1.42, 0.0}, {-0.22, 1.15, 0.02}, {-0.24, 0.9, 0.05},
      {0.18, 1.42, 0.0},   {0.22, 1.15, 0.02},  {0.24, 0.9, 0.05},  {-0.1, 0.95, 0.0},   {-0.11, 0.5, 0.03},
      {-0.11, 0.08, 0.0},  {0.1, 0.95, 0.0},    {0.11, 0.5, 0.03},  {0.11, 0.08, 0.0},   {-0.03, 1.63, 0.07},
      {0.03, 1.63, 0.07},  {-0.07, 1.6, 0.0},   {0.07, 1.6, 0.0}};
  return pose;
}

}  // namespace

motion::MotionSequence walking_motion(int frames) {
  motion::MotionSequence seq;
  seq.skeleton = motion::body18_skeleton();
  seq.fps = 24.0;
  for (int f = 0; f < frames; ++f) {
    const double swing = std::sin(0.7 * f);
    std::vector<geom::Point3> joints = rest_pose();
    joints[4].z() += 0.12 * swing;
    joints[7].z() -= 0.12 * swing;
    joints[9].z() -= 0.1 * swing;
    joints[10].z() -= 0.15 * swing;
    joints[12].z() += 0.1 * swing;
    joints[13].z() += 0.15 * swing;
    for (auto& p : joints) p.x() += 0.021 * f;
    seq.frames.push_back(std::move(joints));
  }
  return seq;
}

motion::MotionSequence standing_motion_in_view(int frames, double depth) {
  motion::MotionSequence seq = walking_motion(frames);
  for (auto& f : seq.frames) {
    for (auto& p : f) p = geom::Point3(p.x() * 0.8 - 0.05, 0.93 - 0.8 * p.y(), depth - 0.8 * p.z());
  }
  return seq;
}

SceneInputs golden_scene() {
  const geom::CameraFrame cam = camera64();
  SceneInputs s;
  s.background = depthmesh::DepthRaster(64, 64);
  s.reference = depthmesh::DepthRaster(64, 64);
  s.mask = Mask(64, 64);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      float d = 3.2f + 0.005f * static_cast<float>(y);
      if (x >= 44 && x < 60 && y >= 10 && y < 30) d = 2.4f;
      s.background.set(x, y, d);
      const bool character = x >= 26 && x < 38 && y >= 12 && y < 58;
      s.mask.set(x, y, character);
      s.reference.set(x, y, character ? 2.45f + 0.002f * static_cast<float>(y) : 0.9f * d);
    }
  }
  s.motion = walking_motion(8);

  io::ReferenceKeypoints kp;
  kp.pixels = {{31.5, 15.2}, {31.5, 20.3}, {27.6, 21.1}, {27.2, 29.4}, {27.1, 36.2}, {35.4, 21.1},
               {36.1, 29.4}, {36.2, 36.2}, {29.6, 36.3}, {29.4, 46.1}, {29.5, 55.2}, {33.5, 36.3},
               {33.6, 46.1}, {33.5, 55.2}, {30.4, 14.1}, {32.6, 14.1}, {29.1, 15.3}, {34.2, 15.3}};
  kp.valid.assign(kp.pixels.size(), 1);
  s.keypoints = kp;

  s.trajectory.mode = trajectory::TrajectorySpec::Mode::Preset;
  s.trajectory.base = cam;
  s.trajectory.preset.kind = trajectory::PresetKind::Dolly;
  s.trajectory.preset.magnitude = 0.6;
  s.trajectory.preset.frames = 8;
  s.trajectory.preset.anchor = geom::Point3(0.0, 0.0, 2.7);

  s.parameters.num_steps = 10;
  s.parameters.depth_fraction = 0.2;
  s.parameters.decay_length = 4.0;
  return s;
}

SceneInputs plane_scene(int frames, double dolly) {
  const geom::CameraFrame cam = camera64();
  SceneInputs s;
  s.background = depthmesh::DepthRaster(64, 64);
  s.reference = depthmesh::DepthRaster(64, 64);
  s.mask = Mask(64, 64);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      s.background.set(x, y, 3.0f);
      s.reference.set(x, y, 3.0f);
      s.mask.set(x, y, x >= 28 && x < 36 && y >= 20 && y < 50);
    }
  }
  s.motion = standing_motion_in_view(frames, 2.5);
  s.trajectory.mode = trajectory::TrajectorySpec::Mode::Preset;
  s.trajectory.base = cam;
  s.trajectory.preset.kind = trajectory::PresetKind::Dolly;
  s.trajectory.preset.magnitude = dolly;
  s.trajectory.preset.frames = frames;
  s.parameters.num_steps = 10;
  return s;
}

fs::path write_scene(const SceneInputs& s, const fs::path& dir) {
  fs::create_directories(dir);
  io::write_depth(s.background, dir / "background.pfm");
  io::write_depth(s.reference, dir / "reference.pfm");
  io::write_mask(s.mask, dir / "mask.png");
  io::write_motion(s.motion, dir / "motion.json");
  io::write_trajectory(s.trajectory, dir / "trajectory.json");
  io::ProjectBundle b;
  b.background_depth = "background.pfm";
  b.reference_depth = "reference.pfm";
  b.mask = "mask.png";
  b.motion = "motion.json";
  b.trajectory = "trajectory.json";
  b.output = "out";
  if (s.keypoints) {
    io::write_text_atomic(dir / "keypoints.json", io::dump_json(io::keypoints_to_json(*s.keypoints)));
    b.reference_keypoints = fs::path("keypoints.json");
  }
  b.parameters = s.parameters;
  io::write_text_atomic(dir / "bundle.json", io::dump_json(io::bundle_to_json(b)));
  return dir / "bundle.json";
}

fs::path temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const fs::path dir = fs::temp_directory_path() /
                       ("camcond_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Mask random_mask(std::mt19937_64& rng, int width, int height) {
  Mask m(width, height);
  std::uniform_real_distribution<double> density(0.001, 0.3);
  const double p = density(rng);
  std::bernoulli_distribution bit(p);
  for (auto& b : m.bits) b = bit(rng) ? 1 : 0;
  if (m.count() == 0) m.bits[rng() % m.bits.size()] = 1;
  return m;
}

depthmesh::SceneMesh random_mesh(std::mt19937_64& rng, const geom::CameraFrame& cam, int max_triangles) {
  std::uniform_int_distribution<int> count(1, max_triangles);
  std::uniform_real_distribution<double> u(-10.0, cam.width + 10.0);
  std::uniform_real_distribution<double> v(-10.0, cam.height + 10.0);
  std::uniform_real_distribution<double> z(0.5, 6.0);
  std::uniform_real_distribution<double> spread(2.0, 30.0);
  depthmesh::SceneMesh mesh;
  const int n = count(rng);
  for (int t = 0; t < n; ++t) {
    const double cu = u(rng);
    const double cv = v(rng);
    const double s = spread(rng);
    std::uniform_real_distribution<double> off(-s, s);
    for (int k = 0; k < 3; ++k) {
      const double px = cu + off(rng);
      const double py = cv + off(rng);
      // Snap some vertices to integer or half-pixel positions so shared
      // edges and pixel-center hits occur.
      const int mode = static_cast<int>(rng() % 3);
      const double qx = mode == 0 ? px : (mode == 1 ? std::round(px) : std::round(px) + 0.5);
      const double qy = mode == 0 ? py : (mode == 1 ? std::round(py) : std::round(py) + 0.5);
      mesh.vertices.push_back(geom::unproject(cam, qx, qy, z(rng)));
      mesh.vertex_source.push_back({0, 0});
    }
    mesh.triangles.push_back({3 * t, 3 * t + 1, 3 * t + 2});
  }
  return mesh;
}

geom::Quat random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  geom::Quat q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

}  // namespace camcond::fixtures
