// Full-sequence render throughput: orbit around a tilted plane with a walking
// character, at several resolutions and sequence lengths.

#include <benchmark/benchmark.h>

#include <cmath>

#include "camcond/depthmesh.hpp"
#include "camcond/log.hpp"
#include "camcond/motion_fit.hpp"
#include "camcond/parallel.hpp"
#include "camcond/raster.hpp"
#include "camcond/simd/kernels.hpp"
#include "camcond/trajectory.hpp"

using namespace camcond;

namespace {

geom::CameraFrame base_camera(int size) {
  geom::CameraFrame cam;
  cam.width = size;
  cam.height = size;
  cam.intrinsics = {0.9 * size, 0.9 * size, size / 2.0, size / 2.0};
  return cam;
}

depthmesh::DepthRaster tilted_plane(int size) {
  depthmesh::DepthRaster d(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      d.set(x, y, static_cast<float>(4.0 + 1.5 * y / size + 0.2 * std::sin(0.05 * x)));
  return d;
}

motion::MotionSequence walker(int frames) {
  motion::MotionSequence seq;
  seq.skeleton = motion::body18_skeleton();
  for (int f = 0; f < frames; ++f) {
    std::vector<geom::Point3> joints;
    for (int j = 0; j < 18; ++j) {
      joints.emplace_back(-0.3 + 0.04 * j + 0.01 * f, -0.8 + 0.1 * j, 3.0 + 0.05 * std::sin(0.3 * f + j));
    }
    seq.frames.push_back(std::move(joints));
  }
  return seq;
}

void render(benchmark::State& state, simd::Isa isa) {
  const int size = static_cast<int>(state.range(0));
  const int frames = static_cast<int>(state.range(1));
  if (isa == simd::Isa::Avx2 && !simd::isa_supported(isa)) {
    state.SkipWithError("AVX2 not available");
    return;
  }
  simd::set_active_isa(isa);
  const auto cam = base_camera(size);
  const auto mesh = depthmesh::build_mesh(tilted_plane(size), cam);
  trajectory::TrajectorySpec spec;
  spec.mode = trajectory::TrajectorySpec::Mode::Preset;
  spec.base = cam;
  spec.preset.kind = trajectory::PresetKind::Orbit;
  spec.preset.magnitude = 20.0;
  spec.preset.frames = frames;
  spec.preset.anchor = geom::Point3(0.0, 0.0, 4.5);
  const auto cams = trajectory::expand(spec);
  const auto motion = walker(frames);
  const raster::SequenceOptions options{default_thread_count(), raster::DepthPolarity::NearBright};
  for (auto _ : state) {
    auto out = raster::render_sequence(mesh, motion, cams, raster::body18_style(), options);
    benchmark::DoNotOptimize(out);
  }
  state.counters["frames/s"] =
      benchmark::Counter(static_cast<double>(frames), benchmark::Counter::kIsIterationInvariantRate);
  state.counters["triangles"] = static_cast<double>(mesh.triangles.size());
}

void BM_RenderScalar(benchmark::State& state) { render(state, simd::Isa::Scalar); }
void BM_RenderAvx2(benchmark::State& state) { render(state, simd::Isa::Avx2); }

}  // namespace

BENCHMARK(BM_RenderScalar)->ArgsProduct({{256, 512, 1024}, {33, 81}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RenderAvx2)->ArgsProduct({{256, 512, 1024}, {33, 81}})->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
  log::init(spdlog::level::warn);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
