#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "camcond/depthmesh.hpp"
#include "camcond/geom.hpp"
#include "camcond/image.hpp"

namespace camcond::transfer {

/// Throws InvalidArgument unless the mask has at least one character pixel
/// and at least one background pixel.
void validate_character_mask(const Mask& mask);

/// Exact Euclidean distance (pixels) from each pixel to the nearest set
/// pixel of `mask`; zero on the mask. Squared distances are computed in
/// integer arithmetic, so the result equals sqrt of the true minimum
/// squared distance exactly. Throws EmptyMask.
Grid<double> distance_transform(const Mask& mask);

/// Squared-distance variant of distance_transform.
Grid<std::int64_t> squared_distance_transform(const Mask& mask);

inline constexpr double kDefaultDecayLength = 1.0;

/// w = exp(-dist / decay_length) at pixels outside the mask; exactly 0 on
/// the mask, which excludes those pixels from every downstream sum.
Grid<double> importance_weights(const Mask& mask, double decay_length = kDefaultDecayLength);

struct TransferParams {
  geom::Point3 p_ref = geom::Point3::Zero();
  geom::Point3 p_bg = geom::Point3::Zero();
  double total_weight = 0.0;
  std::size_t contributing_pixels = 0;
};

/// Importance-weighted centroids of the lifted reference and background
/// depth over background pixels valid in both rasters, accumulated in
/// row-major order.
TransferParams weighted_centroids(const depthmesh::DepthRaster& d_ref,
                                  const depthmesh::DepthRaster& d_bg, const geom::CameraFrame& cam,
                                  const Mask& mask, double decay_length = kDefaultDecayLength);

/// z_bg = (z_ref - p_ref.z) * (p_bg.z / p_ref.z) + p_bg.z
double align_character_depth(double z_ref, const TransferParams& params);

struct CharacterPoints {
  std::vector<geom::Point3> points;
  std::vector<std::array<int, 2>> pixels;
  std::vector<double> depths;
  TransferParams params;
};

/// Re-registers the character into the background scene: every mask pixel
/// with valid reference depth is unprojected along its own ray at the
/// aligned depth.
CharacterPoints transfer_character(const depthmesh::DepthRaster& d_ref,
                                   const depthmesh::DepthRaster& d_bg,
                                   const geom::CameraFrame& cam, const Mask& mask,
                                   double decay_length = kDefaultDecayLength);

}  // namespace camcond::transfer
