#include <doctest.h>

#include <cmath>
#include <random>

#include "camcond/error.hpp"
#include "camcond/scene_transfer.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace camcond;
using depthmesh::DepthRaster;

namespace {

DepthRaster random_depth(std::mt19937_64& rng, int w, int h, double invalid_rate) {
  std::uniform_real_distribution<float> z(0.5f, 9.0f);
  std::bernoulli_distribution drop(invalid_rate);
  DepthRaster d(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) d.set(x, y, drop(rng) ? std::nanf("") : z(rng));
  return d;
}

}  // namespace

TEST_SUITE("scene_transfer") {

TEST_CASE("distance is zero on the mask and 5 at (3,4)") {
  Mask m(8, 8);
  m.set(0, 0, true);
  const auto d = transfer::distance_transform(m);
  CHECK(d.at(0, 0) == 0.0);
  CHECK(d.at(3, 4) == 5.0);
}

TEST_CASE("distance transform equals brute force on random masks") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 20; ++i) {
    const int w = 1 + static_cast<int>(rng() % 40);
    const int h = 1 + static_cast<int>(rng() % 40);
    const Mask m = fixtures::random_mask(rng, w, h);
    const auto got = transfer::squared_distance_transform(m);
    const auto want = oracle::brute_force_sqdist(m);
    CHECK(got.data == want.data);
    const auto dist = transfer::distance_transform(m);
    for (std::size_t k = 0; k < dist.data.size(); ++k) {
      CHECK(dist.data[k] == std::sqrt(static_cast<double>(want.data[k])));
    }
  }
}

TEST_CASE("empty mask has no distance transform") {
  try {
    (void)transfer::distance_transform(Mask(4, 4));
    FAIL("expected EmptyMask");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyMask);
  }
}

TEST_CASE("importance weights follow exp(-d / decay)") {
  Mask m(16, 1);
  m.set(0, 0, true);
  const double decay = 3.0 / std::log(2.0);
  const auto w = transfer::importance_weights(m, decay);
  CHECK(w.at(0, 0) == 0.0);
  CHECK(w.at(3, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(w.at(1, 0) == doctest::Approx(std::exp(-1.0 / decay)).epsilon(1e-15));
  // Weights approach 1 as the distance shrinks.
  const auto fine = transfer::importance_weights(m, 1e9);
  CHECK(fine.at(1, 0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("total weight matches the oracle composition") {
  std::mt19937_64 rng(7);
  const auto cam = fixtures::camera64();
  for (int i = 0; i < 5; ++i) {
    Mask m = fixtures::random_mask(rng, 64, 64);
    const auto d = random_depth(rng, 64, 64, 0.0);
    const auto p = transfer::weighted_centroids(d, d, cam, m, 2.5);
    const auto sq = oracle::brute_force_sqdist(m);
    double total = 0.0;
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x)
        if (!m.at(x, y)) total += std::exp(-std::sqrt(static_cast<double>(sq.at(x, y))) / 2.5);
    CHECK(p.total_weight == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("identical rasters give identical centroids") {
  std::mt19937_64 rng(9);
  const auto cam = fixtures::camera64();
  const auto d = random_depth(rng, 64, 64, 0.1);
  const auto s = fixtures::golden_scene();
  const auto p = transfer::weighted_centroids(d, d, cam, s.mask, 4.0);
  CHECK(p.p_ref == p.p_bg);
}

TEST_CASE("two equally weighted pixels average their lifted points") {
  geom::CameraFrame cam;
  cam.width = 3;
  cam.height = 1;
  cam.intrinsics = {1.0, 1.0, 0.5, 0.5};
  Mask m(3, 1);
  m.set(1, 0, true);
  DepthRaster d(3, 1);
  d.set(0, 0, 2.0f);
  d.set(2, 0, 4.0f);
  const auto p = transfer::weighted_centroids(d, d, cam, m, 1.0);
  CHECK(p.p_ref.z() == 3.0);
  CHECK(p.contributing_pixels == 2);
}

TEST_CASE("centroids match naive double-loop summation") {
  std::mt19937_64 rng(12);
  auto cam = fixtures::camera64();
  cam.extrinsics = geom::make_extrinsics(fixtures::random_rotation(rng), geom::Vec3(0.2, -1.0, 0.4));
  for (int i = 0; i < 5; ++i) {
    const Mask m = fixtures::random_mask(rng, 64, 64);
    const auto dr = random_depth(rng, 64, 64, 0.1);
    const auto db = random_depth(rng, 64, 64, 0.1);
    const auto got = transfer::weighted_centroids(dr, db, cam, m, 3.0);
    const auto want = oracle::naive_centroids(dr, db, cam, m, 3.0);
    CHECK((got.p_ref - want.p_ref).norm() <= 1e-9 * want.p_ref.norm());
    CHECK((got.p_bg - want.p_bg).norm() <= 1e-9 * want.p_bg.norm());
    CHECK(got.contributing_pixels == want.contributing_pixels);
  }
}

TEST_CASE("align_character_depth substitutes into the affine map") {
  transfer::TransferParams p;
  p.p_ref = geom::Point3(0, 0, 2);
  p.p_bg = geom::Point3(0, 0, 4);
  CHECK(transfer::align_character_depth(3.0, p) == 6.0);
  CHECK(transfer::align_character_depth(2.0, p) == 4.0);
  p.p_bg = p.p_ref;
  for (double z : {0.5, 1.0, 2.0, 7.25}) CHECK(transfer::align_character_depth(z, p) == z);
}

TEST_CASE("centroid depth maps exactly onto the background centroid") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> z(0.1, 20.0);
  for (int i = 0; i < 10000; ++i) {
    transfer::TransferParams p;
    p.p_ref.z() = z(rng);
    p.p_bg.z() = z(rng);
    CHECK(transfer::align_character_depth(p.p_ref.z(), p) == p.p_bg.z());
  }
}

TEST_CASE("identity transfer equals direct unprojection") {
  const auto s = fixtures::golden_scene();
  const auto cam = fixtures::camera64();
  const auto c = transfer::transfer_character(s.reference, s.reference, cam, s.mask, 4.0);
  CHECK(c.points.size() == s.mask.count());
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto [x, y] = c.pixels[i];
    const auto direct = geom::unproject(cam, x + 0.5, y + 0.5, s.reference.at(x, y));
    CHECK((c.points[i] - direct).norm() <= 1e-9);
    const auto p = geom::project(cam, c.points[i]);
    CHECK(std::abs(p.u - (x + 0.5)) < 1e-9);
    CHECK(std::abs(p.v - (y + 0.5)) < 1e-9);
  }
}

TEST_CASE("doubled background doubles character depth about the centroid") {
  const auto cam = fixtures::camera64();
  DepthRaster ref(64, 64), bg(64, 64);
  Mask m(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) {
      const bool in = x >= 20 && x < 40 && y >= 20 && y < 44;
      m.set(x, y, in);
      ref.set(x, y, in ? 1.7f + 0.01f * static_cast<float>(x) : 2.0f);
      bg.set(x, y, 4.0f);
    }
  const auto c = transfer::transfer_character(ref, bg, cam, m, 2.0);
  REQUIRE(c.params.p_ref.z() == 2.0);
  REQUIRE(c.params.p_bg.z() == 4.0);
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto [x, y] = c.pixels[i];
    const double want = (ref.at(x, y) - 2.0) * 2.0 + 4.0;
    CHECK(c.depths[i] == doctest::Approx(want).epsilon(1e-15));
  }
}

TEST_CASE("mask must have both classes") {
  Mask all(4, 4);
  for (auto& b : all.bits) b = 1;
  CHECK_THROWS_AS(transfer::validate_character_mask(all), Error);
  CHECK_THROWS_AS(transfer::validate_character_mask(Mask(4, 4)), Error);
}

}
