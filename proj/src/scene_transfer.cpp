#include "camcond/scene_transfer.hpp"

#include <cmath>
#include <string>

#include "camcond/error.hpp"
#include "camcond/simd/kernels.hpp"

namespace camcond::transfer {

void validate_character_mask(const Mask& mask) {
  const std::size_t n = mask.count();
  if (n == 0) throw Error(ErrorCode::EmptyMask, "character mask has no set pixel");
  if (n == mask.bits.size()) {
    throw Error(ErrorCode::InvalidArgument, "character mask covers the whole image");
  }
}

namespace {

// Floor division for a positive divisor.
std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && (num < 0)) --q;
  return q;
}

// Row pass of Meijster et al.'s linear-time exact EDT, on squared column
// distances g2 (one row). Writes squared distances into out.
void meijster_row(const std::int64_t* g2, int width, std::int64_t* out,
                  std::vector<int>& s, std::vector<int>& t) {
  auto f = [&](int x, int i) {
    const std::int64_t d = x - i;
    return d * d + g2[i];
  };
  auto sep = [&](int i, int u) {
    return floor_div(static_cast<std::int64_t>(u) * u - static_cast<std::int64_t>(i) * i + g2[u] - g2[i],
                     2 * static_cast<std::int64_t>(u - i));
  };
  int q = 0;
  s[0] = 0;
  t[0] = 0;
  for (int u = 1; u < width; ++u) {
    while (q >= 0 && f(t[static_cast<std::size_t>(q)], s[static_cast<std::size_t>(q)]) > f(t[static_cast<std::size_t>(q)], u)) --q;
    if (q < 0) {
      q = 0;
      s[0] = u;
    } else {
      const std::int64_t w = 1 + sep(s[static_cast<std::size_t>(q)], u);
      if (w < width) {
        ++q;
        s[static_cast<std::size_t>(q)] = u;
        t[static_cast<std::size_t>(q)] = static_cast<int>(w);
      }
    }
  }
  for (int u = width - 1; u >= 0; --u) {
    out[u] = f(u, s[static_cast<std::size_t>(q)]);
    if (u == t[static_cast<std::size_t>(q)]) --q;
  }
}

}  // namespace

Grid<std::int64_t> squared_distance_transform(const Mask& mask) {
  if (mask.count() == 0) throw Error(ErrorCode::EmptyMask, "mask has no set pixel");
  const int w = mask.width;
  const int h = mask.height;

  Grid<std::int32_t> columns(w, h);
  simd::kernels().edt_columns(mask.bits.data(), w, h, columns.data.data());

  Grid<std::int64_t> out(w, h);
  std::vector<std::int64_t> g2(static_cast<std::size_t>(w));
  std::vector<int> s(static_cast<std::size_t>(w));
  std::vector<int> t(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int64_t g = columns.at(x, y);
      g2[static_cast<std::size_t>(x)] = g * g;
    }
    meijster_row(g2.data(), w, out.data.data() + out.index(0, y), s, t);
  }
  return out;
}

Grid<double> distance_transform(const Mask& mask) {
  const Grid<std::int64_t> sq = squared_distance_transform(mask);
  Grid<double> out(sq.width, sq.height);
  for (std::size_t i = 0; i < sq.data.size(); ++i) {
    out.data[i] = std::sqrt(static_cast<double>(sq.data[i]));
  }
  return out;
}

Grid<double> importance_weights(const Mask& mask, double decay_length) {
  if (!(decay_length > 0.0) || !std::isfinite(decay_length)) {
    throw Error(ErrorCode::InvalidArgument, "decay_length must be finite and > 0");
  }
  const Grid<double> dist = distance_transform(mask);
  Grid<double> w(mask.width, mask.height, 0.0);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) w.at(x, y) = std::exp(-dist.at(x, y) / decay_length);
    }
  }
  return w;
}

TransferParams weighted_centroids(const depthmesh::DepthRaster& d_ref,
                                  const depthmesh::DepthRaster& d_bg, const geom::CameraFrame& cam,
                                  const Mask& mask, double decay_length) {
  const int w = cam.width;
  const int h = cam.height;
  if (d_ref.width() != w || d_ref.height() != h || d_bg.width() != w || d_bg.height() != h ||
      mask.width != w || mask.height != h) {
    throw Error(ErrorCode::DimensionMismatch,
                "reference depth, background depth, mask and camera must share dimensions");
  }
  const Grid<double> weights = importance_weights(mask, decay_length);

  TransferParams params;
  geom::Vec3 sum_ref = geom::Vec3::Zero();
  geom::Vec3 sum_bg = geom::Vec3::Zero();
  double sum_w = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y) || !d_ref.valid(x, y) || !d_bg.valid(x, y)) continue;
      const double wt = weights.at(x, y);
      if (wt == 0.0) continue;
      sum_ref += wt * geom::unproject(cam, x + 0.5, y + 0.5, d_ref.at(x, y));
      sum_bg += wt * geom::unproject(cam, x + 0.5, y + 0.5, d_bg.at(x, y));
      sum_w += wt;
      ++params.contributing_pixels;
    }
  }
  if (!(sum_w > 0.0)) {
    throw Error(ErrorCode::ZeroTotalWeight,
                "no background pixel with valid depth in both rasters carries weight");
  }
  params.p_ref = sum_ref / sum_w;
  params.p_bg = sum_bg / sum_w;
  params.total_weight = sum_w;
  return params;
}

double align_character_depth(double z_ref, const TransferParams& params) {
  const double pz_ref = params.p_ref.z();
  const double pz_bg = params.p_bg.z();
  if (!(pz_ref > 0.0) || !(pz_bg > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "centroid depths must be > 0");
  }
  const double z = (z_ref - pz_ref) * (pz_bg / pz_ref) + pz_bg;
  if (!(z > 0.0)) {
    throw Error(ErrorCode::NonPositiveResult,
                "aligned depth " + std::to_string(z) + " for reference depth " +
                    std::to_string(z_ref) + " is not positive");
  }
  return z;
}

CharacterPoints transfer_character(const depthmesh::DepthRaster& d_ref,
                                   const depthmesh::DepthRaster& d_bg,
                                   const geom::CameraFrame& cam, const Mask& mask,
                                   double decay_length) {
  CharacterPoints out;
  out.params = weighted_centroids(d_ref, d_bg, cam, mask, decay_length);
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      if (!mask.at(x, y) || !d_ref.valid(x, y)) continue;
      const double z = align_character_depth(d_ref.at(x, y), out.params);
      out.points.push_back(geom::unproject(cam, x + 0.5, y + 0.5, z));
      out.pixels.push_back({x, y});
      out.depths.push_back(z);
    }
  }
  return out;
}

}  // namespace camcond::transfer
