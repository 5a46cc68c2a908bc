#include <doctest.h>

#include <cstring>
#include <limits>
#include <random>

#include "camcond/raster.hpp"
#include "camcond/scene_transfer.hpp"
#include "camcond/simd/kernels.hpp"
#include "support/fixtures.hpp"

using namespace camcond;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<simd::Isa> vector_isas() {
  std::vector<simd::Isa> out;
  if (simd::isa_supported(simd::Isa::Avx2)) out.push_back(simd::Isa::Avx2);
  return out;
}

struct IsaGuard {
  simd::Isa saved = simd::active_isa();
  ~IsaGuard() { simd::set_active_isa(saved); }
};

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar kernels are always available") {
  CHECK(simd::isa_supported(simd::Isa::Scalar));
  CHECK(simd::kernels_for(simd::Isa::Scalar).isa == simd::Isa::Scalar);
  MESSAGE("active isa: " << simd::to_string(simd::active_isa()));
}

TEST_CASE("raster span kernels agree bit for bit") {
  std::mt19937_64 rng(1);
  const auto cam = fixtures::camera64();
  const auto& scalar = simd::kernels_for(simd::Isa::Scalar);
  for (auto isa : vector_isas()) {
    const auto& vec = simd::kernels_for(isa);
    for (int m = 0; m < 200; ++m) {
      const auto mesh = fixtures::random_mesh(rng, cam, 10);
      for (const auto& tri : raster::project_triangles(mesh, cam)) {
        const auto setup = raster::make_setup(tri);
        if (!setup) continue;
        for (int row = 0; row < 64; row += 3) {
          const int x0 = static_cast<int>(rng() % 20);
          const int x1 = x0 + static_cast<int>(rng() % 45);
          std::vector<double> a(64, kInf), b(64, kInf);
          for (int x = 0; x < 64; x += 7) a[static_cast<std::size_t>(x)] = b[static_cast<std::size_t>(x)] = 3.0;
          scalar.raster_span(*setup, row + 0.5, x0, x1, a.data());
          vec.raster_span(*setup, row + 0.5, x0, x1, b.data());
          CHECK(same_bits(a, b));
        }
      }
    }
  }
}

TEST_CASE("normalize kernels agree bit for bit") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> z(0.5, 10.0);
  const auto& scalar = simd::kernels_for(simd::Isa::Scalar);
  for (auto isa : vector_isas()) {
    const auto& vec = simd::kernels_for(isa);
    for (int i = 0; i < 500; ++i) {
      const int n = 1 + static_cast<int>(rng() % 67);
      std::vector<double> d(static_cast<std::size_t>(n));
      double lo = kInf, hi = -kInf;
      for (auto& v : d) {
        v = (rng() % 5 == 0) ? kInf : z(rng);
        if (v < kInf) lo = std::min(lo, v), hi = std::max(hi, v);
      }
      if (!(hi > lo)) lo = 0.5, hi = 10.0;
      std::vector<std::uint8_t> a(d.size()), b(d.size());
      scalar.normalize_row(d.data(), n, lo, hi, a.data());
      vec.normalize_row(d.data(), n, lo, hi, b.data());
      CHECK(a == b);
    }
  }
}

TEST_CASE("distance column kernels agree") {
  std::mt19937_64 rng(3);
  const auto& scalar = simd::kernels_for(simd::Isa::Scalar);
  for (auto isa : vector_isas()) {
    const auto& vec = simd::kernels_for(isa);
    for (int i = 0; i < 100; ++i) {
      const int w = 1 + static_cast<int>(rng() % 70);
      const int h = 1 + static_cast<int>(rng() % 70);
      const Mask m = fixtures::random_mask(rng, w, h);
      std::vector<std::int32_t> a(m.bits.size()), b(m.bits.size());
      scalar.edt_columns(m.bits.data(), w, h, a.data());
      vec.edt_columns(m.bits.data(), w, h, b.data());
      CHECK(a == b);
    }
  }
}

TEST_CASE("whole-frame outputs match across dispatch targets") {
  IsaGuard guard;
  std::mt19937_64 rng(4);
  const auto cam = fixtures::camera64();
  for (auto isa : vector_isas()) {
    for (int i = 0; i < 20; ++i) {
      const auto mesh = fixtures::random_mesh(rng, cam, 50);
      const Mask m = fixtures::random_mask(rng, 64, 64);
      simd::set_active_isa(simd::Isa::Scalar);
      const auto za = raster::rasterize_mesh_depth(mesh, cam);
      const auto da = transfer::squared_distance_transform(m);
      simd::set_active_isa(isa);
      const auto zb = raster::rasterize_mesh_depth(mesh, cam);
      const auto db = transfer::squared_distance_transform(m);
      CHECK(same_bits(za.zbuffer, zb.zbuffer));
      CHECK(da.data == db.data);
    }
  }
}

}
