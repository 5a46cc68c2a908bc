#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "camcond/geom.hpp"

namespace camcond::motion {

struct Skeleton {
  std::string name;
  std::vector<std::string> joints;
  std::vector<std::array<int, 2>> limbs;
  int root = 0;

  bool operator==(const Skeleton&) const = default;
};

/// The 18-joint body convention (nose, neck, shoulders, elbows, wrists,
/// hips, knees, ankles, eyes, ears) with its 17 limbs; root is the neck.
Skeleton body18_skeleton();

/// T frames of J joints in world coordinates (meters).
struct MotionSequence {
  Skeleton skeleton;
  double fps = 30.0;
  std::vector<std::vector<geom::Point3>> frames;
  /// Optional per-frame, per-joint validity; empty means every joint valid.
  std::vector<std::vector<std::uint8_t>> valid;

  [[nodiscard]] int num_frames() const { return static_cast<int>(frames.size()); }
  [[nodiscard]] int num_joints() const {
    return frames.empty() ? static_cast<int>(skeleton.joints.size())
                          : static_cast<int>(frames.front().size());
  }
  [[nodiscard]] bool joint_valid(int frame, int joint) const {
    return valid.empty() || valid[static_cast<std::size_t>(frame)][static_cast<std::size_t>(joint)] != 0;
  }
};

/// Throws SchemaViolation naming the offending frame/joint when the sequence
/// breaks its invariants (T >= 1, constant J matching the skeleton, finite
/// coordinates, limb indices in range).
void validate(const MotionSequence& seq);

/// p -> scale * R * p + translation
struct SimilarityTransform {
  double scale = 1.0;
  geom::Quat rotation = geom::Quat::Identity();
  geom::Vec3 translation = geom::Vec3::Zero();

  [[nodiscard]] geom::Point3 apply(const geom::Point3& p) const;
  [[nodiscard]] bool is_identity() const;
};

/// Returns x -> outer(inner(x)).
SimilarityTransform compose(const SimilarityTransform& outer, const SimilarityTransform& inner);

/// Collinearity threshold on the ratio of the second to the first singular
/// value of the centered source scatter.
inline constexpr double kCollinearTolerance = 1e-9;

/// Closed-form least-squares similarity (Umeyama) mapping `source` onto
/// `target` over the entries flagged in `valid`, with reflection correction
/// so det(R) = +1. Throws DegenerateConfiguration for fewer than three
/// valid pairs or (near-)collinear sources.
SimilarityTransform fit_similarity(std::span<const geom::Point3> source,
                                   std::span<const geom::Point3> target,
                                   std::span<const std::uint8_t> valid);

MotionSequence apply_similarity(const MotionSequence& seq, const SimilarityTransform& xf);

struct FitResult {
  MotionSequence motion;
  SimilarityTransform transform;
  /// Root-mean-square frame-0 residual over the valid joints, meters.
  double frame0_rms = 0.0;
};

/// Fits frame 0 of `seq` to the reference keypoints and applies the single
/// resulting transform to every frame. A joint participates only if it is
/// valid in both frame 0 and `ref_valid`.
FitResult fit_to_reference(const MotionSequence& seq, std::span<const geom::Point3> ref_keypoints,
                           std::span<const std::uint8_t> ref_valid);

}  // namespace camcond::motion
