#pragma once

#include "camcond/geom.hpp"

namespace camcond::linalg {

/// A = U * diag(sigma) * V^T with U, V orthogonal and sigma sorted in
/// decreasing order. When A is rank deficient the missing left singular
/// vectors are completed to a right-handed orthonormal basis.
struct Svd3 {
  geom::Mat3 u = geom::Mat3::Identity();
  geom::Vec3 sigma = geom::Vec3::Zero();
  geom::Mat3 v = geom::Mat3::Identity();
  int sweeps = 0;
};

/// Convergence threshold on the normalized column inner products.
inline constexpr double kJacobiTolerance = 1e-12;

/// One-sided (Hestenes) Jacobi SVD. Deterministic: a fixed cyclic pivot
/// order and no data-dependent reordering beyond the final sort.
Svd3 svd3(const geom::Mat3& a);

}  // namespace camcond::linalg
