// Compiled with -mavx2 only; the dispatcher never calls into this translation
// unit unless the CPU reports AVX2 support.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "camcond/simd/kernels.hpp"

namespace camcond::simd::detail {
namespace {

struct EdgeLanes {
  __m256d row;
  __m256d dy;
  __m256d ax;
  __m256d top_left;
};

inline EdgeLanes load_edge(const Edge& e, double row_center_y) {
  return EdgeLanes{_mm256_set1_pd(e.dx * (row_center_y - e.ay)), _mm256_set1_pd(e.dy),
                   _mm256_set1_pd(e.ax),
                   e.top_left ? _mm256_castsi256_pd(_mm256_set1_epi64x(-1)) : _mm256_setzero_pd()};
}

inline __m256d inside(const EdgeLanes& e, __m256d px, __m256d& weight) {
  weight = _mm256_sub_pd(e.row, _mm256_mul_pd(e.dy, _mm256_sub_pd(px, e.ax)));
  const __m256d zero = _mm256_setzero_pd();
  const __m256d gt = _mm256_cmp_pd(weight, zero, _CMP_GT_OQ);
  const __m256d eq = _mm256_and_pd(_mm256_cmp_pd(weight, zero, _CMP_EQ_OQ), e.top_left);
  return _mm256_or_pd(gt, eq);
}

void raster_span_avx2(const TriangleSetup& tri, double row_center_y, int x_begin, int x_end,
                      double* zrow) {
  const EdgeLanes e0 = load_edge(tri.edges[0], row_center_y);
  const EdgeLanes e1 = load_edge(tri.edges[1], row_center_y);
  const EdgeLanes e2 = load_edge(tri.edges[2], row_center_y);
  const __m256d iz0 = _mm256_set1_pd(tri.inv_depth[0]);
  const __m256d iz1 = _mm256_set1_pd(tri.inv_depth[1]);
  const __m256d iz2 = _mm256_set1_pd(tri.inv_depth[2]);
  const __m256d area = _mm256_set1_pd(tri.area);
  const __m256d lane_offset = _mm256_set_pd(3.5, 2.5, 1.5, 0.5);

  int x = x_begin;
  for (; x + 4 <= x_end; x += 4) {
    const __m256d px = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(x)), lane_offset);
    __m256d w0, w1, w2;
    const __m256d cov =
        _mm256_and_pd(_mm256_and_pd(inside(e0, px, w0), inside(e1, px, w1)), inside(e2, px, w2));
    if (_mm256_movemask_pd(cov) == 0) continue;
    const __m256d denom = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(w0, iz0), _mm256_mul_pd(w1, iz1)), _mm256_mul_pd(w2, iz2));
    const __m256d depth = _mm256_div_pd(area, denom);
    const __m256d z = _mm256_loadu_pd(zrow + x);
    const __m256d nearer = _mm256_and_pd(cov, _mm256_cmp_pd(depth, z, _CMP_LT_OQ));
    _mm256_storeu_pd(zrow + x, _mm256_blendv_pd(z, depth, nearer));
  }
  if (x < x_end) scalar_kernels().raster_span(tri, row_center_y, x, x_end, zrow);
}

void normalize_row_avx2(const double* depth, int count, double d_min, double d_max,
                        std::uint8_t* out) {
  const __m256d range = _mm256_set1_pd(d_max - d_min);
  const __m256d dmax = _mm256_set1_pd(d_max);
  const __m256d scale = _mm256_set1_pd(255.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d lo = _mm256_setzero_pd();
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());

  int i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d d = _mm256_loadu_pd(depth + i);
    const __m256d covered = _mm256_cmp_pd(d, inf, _CMP_LT_OQ);
    __m256d g = _mm256_div_pd(_mm256_mul_pd(scale, _mm256_sub_pd(dmax, d)), range);
    g = _mm256_floor_pd(_mm256_add_pd(g, half));
    g = _mm256_min_pd(_mm256_max_pd(g, lo), scale);
    g = _mm256_and_pd(g, covered);
    const __m128i g32 = _mm256_cvtpd_epi32(g);
    const __m128i g16 = _mm_packus_epi32(g32, g32);
    const __m128i g8 = _mm_packus_epi16(g16, g16);
    const int packed = _mm_cvtsi128_si32(g8);
    std::copy_n(reinterpret_cast<const std::uint8_t*>(&packed), 4, out + i);
  }
  if (i < count) scalar_kernels().normalize_row(depth + i, count - i, d_min, d_max, out + i);
}

void edt_columns_avx2(const std::uint8_t* mask, int width, int height, std::int32_t* out) {
  const __m256i inf = _mm256_set1_epi32(width + height);
  const __m256i one = _mm256_set1_epi32(1);
  const __m256i zero = _mm256_setzero_si256();

  auto mask_lanes = [&](int y, int x) {
    const std::uint8_t* m = mask + static_cast<std::ptrdiff_t>(y) * width + x;
    const __m128i bytes = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(m));
    return _mm256_cmpgt_epi32(_mm256_cvtepu8_epi32(bytes), zero);
  };

  const int vec_end = width - width % 8;
  for (int x = 0; x < vec_end; x += 8) {
    __m256i prev = _mm256_blendv_epi8(inf, zero, mask_lanes(0, x));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + x), prev);
    for (int y = 1; y < height; ++y) {
      const __m256i cur = _mm256_blendv_epi8(_mm256_add_epi32(prev, one), zero, mask_lanes(y, x));
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + static_cast<std::ptrdiff_t>(y) * width + x),
                          cur);
      prev = cur;
    }
    for (int y = height - 2; y >= 0; --y) {
      auto* cur_ptr = reinterpret_cast<__m256i*>(out + static_cast<std::ptrdiff_t>(y) * width + x);
      const __m256i cur = _mm256_loadu_si256(cur_ptr);
      const __m256i cand = _mm256_add_epi32(prev, one);
      const __m256i next = _mm256_min_epi32(cur, cand);
      _mm256_storeu_si256(cur_ptr, next);
      prev = next;
    }
  }

  // Remaining columns follow the scalar recurrences column by column.
  const std::int32_t inf_s = width + height;
  for (int x = vec_end; x < width; ++x) {
    out[x] = mask[x] ? 0 : inf_s;
    for (int y = 1; y < height; ++y) {
      const auto idx = static_cast<std::ptrdiff_t>(y) * width + x;
      out[idx] = mask[idx] ? 0 : out[idx - width] + 1;
    }
    for (int y = height - 2; y >= 0; --y) {
      const auto idx = static_cast<std::ptrdiff_t>(y) * width + x;
      if (out[idx + width] + 1 < out[idx]) out[idx] = out[idx + width] + 1;
    }
  }
}

}  // namespace

const Kernels& avx2_kernels() noexcept {
  static const Kernels k{Isa::Avx2, &raster_span_avx2, &normalize_row_avx2, &edt_columns_avx2};
  return k;
}

}  // namespace camcond::simd::detail
