#include "camcond/metrics.hpp"

#include <cmath>
#include <string>

#include "camcond/error.hpp"
#include "camcond/svd3.hpp"

namespace camcond::metrics {

MpjpeReport mpjpe_report(const motion::MotionSequence& a, const motion::MotionSequence& b,
                         bool align_root) {
  if (a.num_frames() != b.num_frames() || a.num_joints() != b.num_joints() ||
      a.skeleton.joints != b.skeleton.joints) {
    throw Error(ErrorCode::ShapeMismatch, "sequences differ in frame count, joint count or skeleton");
  }
  if (a.num_frames() == 0 || a.num_joints() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "sequences are empty");
  }
  const int root = a.skeleton.root;
  MpjpeReport report;
  double total = 0.0;
  for (int f = 0; f < a.num_frames(); ++f) {
    const auto& fa = a.frames[static_cast<std::size_t>(f)];
    const auto& fb = b.frames[static_cast<std::size_t>(f)];
    const geom::Vec3 shift = align_root ? geom::Vec3(fa[static_cast<std::size_t>(root)] -
                                                     fb[static_cast<std::size_t>(root)])
                                        : geom::Vec3::Zero();
    double frame_sum = 0.0;
    for (std::size_t j = 0; j < fa.size(); ++j) {
      const geom::Vec3 pb = align_root ? geom::Vec3(fb[j] + shift) : fb[j];
      frame_sum += (fa[j] - pb).norm();
    }
    report.per_frame.push_back(frame_sum / static_cast<double>(fa.size()));
    total += frame_sum;
  }
  report.value = total / (static_cast<double>(a.num_frames()) * static_cast<double>(a.num_joints()));
  return report;
}

double mpjpe(const motion::MotionSequence& a, const motion::MotionSequence& b, bool align_root) {
  return mpjpe_report(a, b, align_root).value;
}

FundamentalMatrix::FundamentalMatrix(const geom::Mat3& f) : f_(f) {
  if (!f.allFinite()) throw Error(ErrorCode::InvalidArgument, "fundamental matrix is not finite");
  const linalg::Svd3 svd = linalg::svd3(f);
  if (!(svd.sigma(0) > 0.0)) throw Error(ErrorCode::InvalidArgument, "fundamental matrix is zero");
  if (svd.sigma(2) / svd.sigma(0) >= 1e-6) {
    throw Error(ErrorCode::InvalidArgument, "fundamental matrix is not rank 2");
  }
}

FundamentalMatrix fundamental_from_cameras(const geom::CameraFrame& cam1,
                                           const geom::CameraFrame& cam2) {
  if ((cam1.extrinsics.center() - cam2.extrinsics.center()).norm() <= 1e-9) {
    throw Error(ErrorCode::ZeroBaseline, "camera centers coincide; F is undefined");
  }
  const geom::Mat3 r1 = cam1.extrinsics.rotation_matrix();
  const geom::Mat3 r2 = cam2.extrinsics.rotation_matrix();
  const geom::Mat3 r_rel = r2 * r1.transpose();
  const geom::Vec3 t_rel = cam2.extrinsics.translation - r_rel * cam1.extrinsics.translation;
  geom::Mat3 tx;
  tx << 0.0, -t_rel.z(), t_rel.y(), t_rel.z(), 0.0, -t_rel.x(), -t_rel.y(), t_rel.x(), 0.0;
  const geom::Mat3 e = tx * r_rel;
  geom::Mat3 f = cam2.intrinsics.inverse_matrix().transpose() * e * cam1.intrinsics.inverse_matrix();
  f /= f.norm();
  return FundamentalMatrix(f);
}

double sampson_distance(const geom::Mat3& f, const geom::Vec3& x1, const geom::Vec3& x2) {
  const geom::Vec3 fx1 = f * x1;
  const geom::Vec3 ftx2 = f.transpose() * x2;
  const double num = x2.dot(fx1);
  const double den = fx1(0) * fx1(0) + fx1(1) * fx1(1) + ftx2(0) * ftx2(0) + ftx2(1) * ftx2(1);
  if (!(den > 0.0)) throw Error(ErrorCode::DegenerateMatch, "Sampson denominator vanishes");
  return num * num / den;
}

double sampson_error(const FundamentalMatrix& f, std::span<const Match> matches) {
  if (matches.empty()) throw Error(ErrorCode::InvalidArgument, "no matches");
  double sum = 0.0;
  for (const auto& m : matches) {
    sum += sampson_distance(f.matrix(), geom::Vec3(m.x1.x(), m.x1.y(), 1.0),
                            geom::Vec3(m.x2.x(), m.x2.y(), 1.0));
  }
  return sum / static_cast<double>(matches.size());
}

}  // namespace camcond::metrics
