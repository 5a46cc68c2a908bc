#pragma once

#include <span>
#include <vector>

#include "camcond/geom.hpp"
#include "camcond/motion_fit.hpp"

namespace camcond::metrics {

struct MpjpeReport {
  double value = 0.0;  // mean over all frames and joints, meters
  std::vector<double> per_frame;
};

/// Mean per-joint position error. With `align_root`, every frame of `b` is
/// translated so its root joint coincides with that of `a` first.
MpjpeReport mpjpe_report(const motion::MotionSequence& a, const motion::MotionSequence& b,
                         bool align_root = false);

double mpjpe(const motion::MotionSequence& a, const motion::MotionSequence& b,
             bool align_root = false);

/// Rank-2 3x3 matrix mapping pixels of view 1 to epipolar lines of view 2.
class FundamentalMatrix {
 public:
  /// Throws InvalidArgument for a zero matrix or one whose singular-value
  /// ratio sigma_min / sigma_max is 1e-6 or more.
  explicit FundamentalMatrix(const geom::Mat3& f);

  [[nodiscard]] const geom::Mat3& matrix() const { return f_; }

 private:
  geom::Mat3 f_;
};

/// F = K2^-T [t_rel]x R_rel K1^-1 with unit Frobenius norm. Throws
/// ZeroBaseline when the camera centers coincide within 1e-9 m.
FundamentalMatrix fundamental_from_cameras(const geom::CameraFrame& cam1,
                                           const geom::CameraFrame& cam2);

struct Match {
  geom::Vec2 x1;  // pixel in view 1
  geom::Vec2 x2;  // pixel in view 2
};

/// First-order Sampson distance (x2^T F x1)^2 / ((F x1)_1^2 + (F x1)_2^2 +
/// (F^T x2)_1^2 + (F^T x2)_2^2) for one match. Throws DegenerateMatch when the
/// denominator vanishes.
double sampson_distance(const geom::Mat3& f, const geom::Vec3& x1, const geom::Vec3& x2);

/// Mean Sampson distance over the matches.
double sampson_error(const FundamentalMatrix& f, std::span<const Match> matches);

}  // namespace camcond::metrics
