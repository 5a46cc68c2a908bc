#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "camcond/geom.hpp"
#include "camcond/image.hpp"

namespace camcond::depthmesh {

/// Metric depth (camera-space z) per pixel. Invalid pixels hold NaN and are
/// never read as depth.
class DepthRaster {
 public:
  static constexpr float kInvalid = std::numeric_limits<float>::quiet_NaN();

  DepthRaster() = default;
  DepthRaster(int width, int height);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }

  [[nodiscard]] bool valid(int x, int y) const { return valid_[index(x, y)] != 0; }
  [[nodiscard]] float at(int x, int y) const { return values_[index(x, y)]; }

  /// Stores `value`; non-finite or non-positive values mark the pixel invalid.
  void set(int x, int y, float value);
  void invalidate(int x, int y);

  [[nodiscard]] std::size_t valid_count() const;
  [[nodiscard]] const std::vector<float>& values() const { return values_; }

  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
  std::vector<std::uint8_t> valid_;
};

/// Bit-exact comparison on valid pixels and identical validity.
bool same_valid_values(const DepthRaster& a, const DepthRaster& b);

struct SceneMesh {
  std::vector<geom::Point3> vertices;
  std::vector<std::array<int, 3>> triangles;
  /// Source pixel (column, row) of each vertex.
  std::vector<std::array<int, 2>> vertex_source;

  [[nodiscard]] bool empty() const { return triangles.empty(); }
};

inline constexpr double kDefaultDiscontinuityRatio = 0.05;
inline constexpr double kMinTriangleArea = 1e-12;

/// Lifts every valid pixel center through `cam` and triangulates each 2x2
/// block of valid pixels into an upper triangle (tl, tr, bl) and a lower
/// triangle (tr, br, bl). A triangle is dropped when one of its edges has
/// relative depth difference |da - db| / min(da, db) above
/// `discontinuity_ratio`, or when its area is below kMinTriangleArea.
/// Only vertices referenced by a surviving triangle are kept, in row-major
/// pixel order. Output does not depend on `threads`.
SceneMesh build_mesh(const DepthRaster& depth, const geom::CameraFrame& cam,
                     double discontinuity_ratio = kDefaultDiscontinuityRatio, int threads = 1);

/// Non-neural hole filling: hole pixels are assigned layer by layer, each
/// taking the mean of its already-assigned 4-neighbors. Pixels outside
/// `hole` are returned unchanged; invalid pixels outside the hole are never
/// used as sources.
DepthRaster fill_holes(const DepthRaster& depth, const Mask& hole);

}  // namespace camcond::depthmesh
