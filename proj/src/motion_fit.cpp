#include "camcond/motion_fit.hpp"

#include <cmath>
#include <string>

#include "camcond/error.hpp"
#include "camcond/svd3.hpp"

namespace camcond::motion {

Skeleton body18_skeleton() {
  Skeleton s;
  s.name = "body-18";
  s.joints = {"nose",    "neck",    "r-shoulder", "r-elbow", "r-wrist", "l-shoulder",
              "l-elbow", "l-wrist", "r-hip",      "r-knee",  "r-ankle", "l-hip",
              "l-knee",  "l-ankle", "r-eye",      "l-eye",   "r-ear",   "l-ear"};
  s.limbs = {{1, 2},  {1, 5},  {2, 3},   {3, 4},   {5, 6},   {6, 7},  {1, 8},  {8, 9}, {9, 10},
             {1, 11}, {11, 12}, {12, 13}, {1, 0},  {0, 14},  {14, 15}, {0, 16}, {16, 17}};
  s.root = 1;
  return s;
}

void validate(const MotionSequence& seq) {
  const auto& sk = seq.skeleton;
  const int j = static_cast<int>(sk.joints.size());
  if (j < 1) throw Error(ErrorCode::SchemaViolation, "skeleton: joint list is empty");
  if (sk.root < 0 || sk.root >= j) {
    throw Error(ErrorCode::SchemaViolation, "skeleton.root: index out of range");
  }
  for (std::size_t l = 0; l < sk.limbs.size(); ++l) {
    for (int end : sk.limbs[l]) {
      if (end < 0 || end >= j) {
        throw Error(ErrorCode::SchemaViolation,
                    "skeleton.limbs[" + std::to_string(l) + "]: joint index out of range");
      }
    }
  }
  if (seq.frames.empty()) throw Error(ErrorCode::SchemaViolation, "frames: sequence is empty");
  if (!(seq.fps > 0.0) || !std::isfinite(seq.fps)) {
    throw Error(ErrorCode::SchemaViolation, "fps: must be finite and > 0");
  }
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    const auto& frame = seq.frames[f];
    if (static_cast<int>(frame.size()) != j) {
      throw Error(ErrorCode::SchemaViolation, "frames[" + std::to_string(f) + "]: expected " +
                                                  std::to_string(j) + " joints, got " +
                                                  std::to_string(frame.size()));
    }
    for (std::size_t k = 0; k < frame.size(); ++k) {
      if (!frame[k].allFinite()) {
        throw Error(ErrorCode::SchemaViolation, "frames[" + std::to_string(f) + "][" +
                                                    std::to_string(k) + "]: non-finite coordinate");
      }
    }
  }
  if (!seq.valid.empty()) {
    if (seq.valid.size() != seq.frames.size()) {
      throw Error(ErrorCode::SchemaViolation, "valid: expected one entry per frame");
    }
    for (std::size_t f = 0; f < seq.valid.size(); ++f) {
      if (static_cast<int>(seq.valid[f].size()) != j) {
        throw Error(ErrorCode::SchemaViolation,
                    "valid[" + std::to_string(f) + "]: expected " + std::to_string(j) + " flags");
      }
    }
  }
}

geom::Point3 SimilarityTransform::apply(const geom::Point3& p) const {
  return scale * (rotation.toRotationMatrix() * p) + translation;
}

bool SimilarityTransform::is_identity() const {
  return scale == 1.0 && rotation.coeffs() == geom::Quat::Identity().coeffs() &&
         translation == geom::Vec3::Zero();
}

SimilarityTransform compose(const SimilarityTransform& outer, const SimilarityTransform& inner) {
  SimilarityTransform out;
  out.scale = outer.scale * inner.scale;
  out.rotation = (outer.rotation * inner.rotation).normalized();
  out.translation =
      outer.scale * (outer.rotation.toRotationMatrix() * inner.translation) + outer.translation;
  return out;
}

SimilarityTransform fit_similarity(std::span<const geom::Point3> source,
                                   std::span<const geom::Point3> target,
                                   std::span<const std::uint8_t> valid) {
  if (source.size() != target.size() || source.size() != valid.size()) {
    throw Error(ErrorCode::ShapeMismatch, "source, target and validity must have equal length");
  }
  std::size_t n = 0;
  geom::Vec3 mu_src = geom::Vec3::Zero();
  geom::Vec3 mu_dst = geom::Vec3::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (!valid[i]) continue;
    mu_src += source[i];
    mu_dst += target[i];
    ++n;
  }
  if (n < 3) {
    throw Error(ErrorCode::DegenerateConfiguration,
                "need at least 3 valid correspondences, got " + std::to_string(n));
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  mu_src *= inv_n;
  mu_dst *= inv_n;

  geom::Mat3 cov = geom::Mat3::Zero();
  geom::Mat3 scatter = geom::Mat3::Zero();
  double var_src = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (!valid[i]) continue;
    const geom::Vec3 xs = source[i] - mu_src;
    const geom::Vec3 xd = target[i] - mu_dst;
    cov += xd * xs.transpose();
    scatter += xs * xs.transpose();
    var_src += xs.squaredNorm();
  }
  cov *= inv_n;
  scatter *= inv_n;
  var_src *= inv_n;

  const linalg::Svd3 src_svd = linalg::svd3(scatter);
  if (!(src_svd.sigma(0) > 0.0) || src_svd.sigma(1) <= kCollinearTolerance * src_svd.sigma(0)) {
    throw Error(ErrorCode::DegenerateConfiguration, "source points are collinear or coincident");
  }

  const linalg::Svd3 svd = linalg::svd3(cov);
  if (!(svd.sigma(0) > 0.0) || svd.sigma(1) <= kCollinearTolerance * svd.sigma(0)) {
    throw Error(ErrorCode::DegenerateConfiguration,
                "cross-covariance has rank < 2; rotation is not determined");
  }
  geom::Vec3 d(1.0, 1.0, 1.0);
  if (svd.u.determinant() * svd.v.determinant() < 0.0) d(2) = -1.0;

  const geom::Mat3 r = svd.u * d.asDiagonal() * svd.v.transpose();
  SimilarityTransform xf;
  xf.scale = svd.sigma.dot(d) / var_src;
  xf.rotation = geom::Quat(r).normalized();
  xf.translation = mu_dst - xf.scale * (xf.rotation.toRotationMatrix() * mu_src);
  if (!(xf.scale > 0.0)) {
    throw Error(ErrorCode::DegenerateConfiguration, "estimated scale is not positive");
  }
  return xf;
}

MotionSequence apply_similarity(const MotionSequence& seq, const SimilarityTransform& xf) {
  if (xf.is_identity()) return seq;
  MotionSequence out = seq;
  const geom::Mat3 sr = xf.scale * xf.rotation.toRotationMatrix();
  for (auto& frame : out.frames) {
    for (auto& p : frame) p = sr * p + xf.translation;
  }
  return out;
}

FitResult fit_to_reference(const MotionSequence& seq, std::span<const geom::Point3> ref_keypoints,
                           std::span<const std::uint8_t> ref_valid) {
  validate(seq);
  const auto& frame0 = seq.frames.front();
  if (ref_keypoints.size() != frame0.size() || ref_valid.size() != frame0.size()) {
    throw Error(ErrorCode::ShapeMismatch, "reference keypoints have " +
                                              std::to_string(ref_keypoints.size()) +
                                              " joints but the motion has " +
                                              std::to_string(frame0.size()));
  }
  std::vector<std::uint8_t> valid(frame0.size());
  for (std::size_t j = 0; j < frame0.size(); ++j) {
    valid[j] = (ref_valid[j] && seq.joint_valid(0, static_cast<int>(j))) ? 1 : 0;
  }

  FitResult result;
  result.transform = fit_similarity(frame0, ref_keypoints, valid);
  result.motion = apply_similarity(seq, result.transform);

  double sq = 0.0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < frame0.size(); ++j) {
    if (!valid[j]) continue;
    sq += (result.motion.frames.front()[j] - ref_keypoints[j]).squaredNorm();
    ++n;
  }
  result.frame0_rms = std::sqrt(sq / static_cast<double>(n));
  return result;
}

}  // namespace camcond::motion
