#include "camcond/svd3.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace camcond::linalg {
namespace {

constexpr int kMaxSweeps = 64;

geom::Vec3 any_orthogonal(const geom::Vec3& n) {
  // Cross with the axis least aligned with n.
  const geom::Vec3 a = n.cwiseAbs();
  geom::Vec3 axis = geom::Vec3::UnitX();
  if (a.y() <= a.x() && a.y() <= a.z()) axis = geom::Vec3::UnitY();
  else if (a.z() <= a.x() && a.z() <= a.y()) axis = geom::Vec3::UnitZ();
  return n.cross(axis).normalized();
}

}  // namespace

Svd3 svd3(const geom::Mat3& a) {
  Svd3 out;
  geom::Mat3 w = a;
  geom::Mat3 v = geom::Mat3::Identity();

  constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (const auto& [p, q] : kPairs) {
      const double alpha = w.col(p).squaredNorm();
      const double beta = w.col(q).squaredNorm();
      const double gamma = w.col(p).dot(w.col(q));
      if (gamma == 0.0 || std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha * beta)) continue;
      rotated = true;
      const double zeta = (beta - alpha) / (2.0 * gamma);
      const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = c * t;
      for (int r = 0; r < 3; ++r) {
        const double wp = w(r, p);
        const double wq = w(r, q);
        w(r, p) = c * wp - s * wq;
        w(r, q) = s * wp + c * wq;
        const double vp = v(r, p);
        const double vq = v(r, q);
        v(r, p) = c * vp - s * vq;
        v(r, q) = s * vp + c * vq;
      }
    }
    if (!rotated) break;
  }
  out.sweeps = sweep;

  std::array<int, 3> order{0, 1, 2};
  geom::Vec3 norms(w.col(0).norm(), w.col(1).norm(), w.col(2).norm());
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return norms(i) > norms(j); });

  geom::Mat3 u = geom::Mat3::Zero();
  for (int k = 0; k < 3; ++k) {
    out.sigma(k) = norms(order[static_cast<std::size_t>(k)]);
    out.v.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    u.col(k) = w.col(order[static_cast<std::size_t>(k)]);
  }

  const double eps = out.sigma(0) * 1e-13;
  if (!(out.sigma(0) > 0.0)) {
    out.u = geom::Mat3::Identity();
    out.sigma.setZero();
    return out;
  }
  u.col(0) /= out.sigma(0);
  if (out.sigma(1) > eps) {
    u.col(1) /= out.sigma(1);
  } else {
    out.sigma(1) = 0.0;
    u.col(1) = any_orthogonal(u.col(0));
  }
  if (out.sigma(2) > eps) {
    u.col(2) /= out.sigma(2);
  } else {
    out.sigma(2) = 0.0;
    u.col(2) = u.col(0).cross(u.col(1)).normalized();
  }
  out.u = u;
  return out;
}

}  // namespace camcond::linalg
