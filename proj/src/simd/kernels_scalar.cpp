#include <algorithm>
#include <cmath>
#include <limits>

#include "camcond/simd/kernels.hpp"

namespace camcond::simd::detail {
namespace {

void raster_span_scalar(const TriangleSetup& tri, double row_center_y, int x_begin, int x_end,
                        double* zrow) {
  const Edge& e0 = tri.edges[0];
  const Edge& e1 = tri.edges[1];
  const Edge& e2 = tri.edges[2];
  const double r0 = e0.dx * (row_center_y - e0.ay);
  const double r1 = e1.dx * (row_center_y - e1.ay);
  const double r2 = e2.dx * (row_center_y - e2.ay);
  for (int x = x_begin; x < x_end; ++x) {
    const double px = static_cast<double>(x) + 0.5;
    const double w0 = r0 - e0.dy * (px - e0.ax);
    const double w1 = r1 - e1.dy * (px - e1.ax);
    const double w2 = r2 - e2.dy * (px - e2.ax);
    const bool in0 = w0 > 0.0 || (w0 == 0.0 && e0.top_left);
    const bool in1 = w1 > 0.0 || (w1 == 0.0 && e1.top_left);
    const bool in2 = w2 > 0.0 || (w2 == 0.0 && e2.top_left);
    if (!(in0 && in1 && in2)) continue;
    const double denom = (w0 * tri.inv_depth[0] + w1 * tri.inv_depth[1]) + w2 * tri.inv_depth[2];
    const double depth = tri.area / denom;
    if (depth < zrow[x]) zrow[x] = depth;
  }
}

void normalize_row_scalar(const double* depth, int count, double d_min, double d_max,
                          std::uint8_t* out) {
  const double range = d_max - d_min;
  for (int i = 0; i < count; ++i) {
    const double d = depth[i];
    if (!(d < std::numeric_limits<double>::infinity())) {
      out[i] = 0;
      continue;
    }
    double g = std::floor(255.0 * (d_max - d) / range + 0.5);
    g = std::min(std::max(g, 0.0), 255.0);
    out[i] = static_cast<std::uint8_t>(static_cast<int>(g));
  }
}

void edt_columns_scalar(const std::uint8_t* mask, int width, int height, std::int32_t* out) {
  const std::int32_t inf = width + height;
  for (int x = 0; x < width; ++x) out[x] = mask[x] ? 0 : inf;
  for (int y = 1; y < height; ++y) {
    const std::uint8_t* m = mask + static_cast<std::ptrdiff_t>(y) * width;
    const std::int32_t* prev = out + static_cast<std::ptrdiff_t>(y - 1) * width;
    std::int32_t* cur = out + static_cast<std::ptrdiff_t>(y) * width;
    for (int x = 0; x < width; ++x) cur[x] = m[x] ? 0 : prev[x] + 1;
  }
  for (int y = height - 2; y >= 0; --y) {
    const std::int32_t* next = out + static_cast<std::ptrdiff_t>(y + 1) * width;
    std::int32_t* cur = out + static_cast<std::ptrdiff_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      if (next[x] + 1 < cur[x]) cur[x] = next[x] + 1;
    }
  }
}

}  // namespace

const Kernels& scalar_kernels() noexcept {
  static const Kernels k{Isa::Scalar, &raster_span_scalar, &normalize_row_scalar,
                         &edt_columns_scalar};
  return k;
}

}  // namespace camcond::simd::detail
