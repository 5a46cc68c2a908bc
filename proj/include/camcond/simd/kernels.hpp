#pragma once

// Data-parallel inner loops shared by the rasterizer, the depth normalizer and
// the distance transform. Every kernel has a scalar reference implementation
// and may have vector variants; all variants of a kernel produce bit-identical
// output, which tests/test_simd_equivalence.cpp enforces.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace camcond::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

/// One triangle edge a->b in snapped screen coordinates. The edge function
/// at pixel center p is dx * (p.y - ay) - dy * (p.x - ax).
struct Edge {
  double ax = 0.0;
  double ay = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  bool top_left = false;
};

/// Screen-space triangle ready for scan conversion. edges[i] is the edge
/// opposite vertex i, so its edge function is the unnormalized barycentric
/// weight of vertex i. `area` is the (positive) sum of the three weights.
struct TriangleSetup {
  std::array<Edge, 3> edges{};
  std::array<double, 3> inv_depth{};
  double area = 0.0;
};

/// Scan-converts pixels [x_begin, x_end) of the row whose centers sit at
/// y = row_center_y, writing the perspective-correct depth into `zrow[x]`
/// where the fragment is covered and nearer than the stored value.
using RasterSpanFn = void (*)(const TriangleSetup& tri, double row_center_y, int x_begin,
                              int x_end, double* zrow);

/// Maps z-buffer depths to 8-bit gray, near = 255. Entries equal to +inf are
/// uncovered and map to 0. Requires d_max > d_min.
using NormalizeRowFn = void (*)(const double* depth, int count, double d_min, double d_max,
                                std::uint8_t* out);

/// Vertical pass of the exact Euclidean distance transform: for every pixel,
/// the distance in rows to the nearest set pixel in its column (or a value
/// >= width + height when the column is empty). `mask` holds 0/1 bytes.
using EdtColumnsFn = void (*)(const std::uint8_t* mask, int width, int height,
                              std::int32_t* out);

struct Kernels {
  Isa isa;
  RasterSpanFn raster_span;
  NormalizeRowFn normalize_row;
  EdtColumnsFn edt_columns;
};

bool isa_supported(Isa isa) noexcept;

/// Kernel table for a specific ISA. Throws InvalidArgument if the CPU (or
/// the build) lacks it.
const Kernels& kernels_for(Isa isa);

/// Kernel table in use. Defaults to the widest supported ISA; the
/// CAMCOND_SIMD environment variable (scalar|avx2) overrides the default.
const Kernels& kernels();
Isa active_isa();
void set_active_isa(Isa isa);

namespace detail {
const Kernels& scalar_kernels() noexcept;
#if defined(CAMCOND_HAVE_AVX2)
const Kernels& avx2_kernels() noexcept;
#endif
}  // namespace detail

}  // namespace camcond::simd
