#include "camcond/depthmesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "camcond/error.hpp"
#include "camcond/parallel.hpp"

namespace camcond::depthmesh {

DepthRaster::DepthRaster(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument, "depth raster must be at least 1x1");
  }
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  values_.assign(n, kInvalid);
  valid_.assign(n, 0);
}

void DepthRaster::set(int x, int y, float value) {
  const auto i = index(x, y);
  if (std::isfinite(value) && value > 0.0f) {
    values_[i] = value;
    valid_[i] = 1;
  } else {
    values_[i] = kInvalid;
    valid_[i] = 0;
  }
}

void DepthRaster::invalidate(int x, int y) {
  const auto i = index(x, y);
  values_[i] = kInvalid;
  valid_[i] = 0;
}

std::size_t DepthRaster::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

bool same_valid_values(const DepthRaster& a, const DepthRaster& b) {
  if (a.width() != b.width() || a.height() != b.height()) return false;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (a.valid(x, y) != b.valid(x, y)) return false;
      if (!a.valid(x, y)) continue;
      const float va = a.at(x, y);
      const float vb = b.at(x, y);
      if (std::memcmp(&va, &vb, sizeof(float)) != 0) return false;
    }
  }
  return true;
}

namespace {

bool edge_continuous(double da, double db, double ratio) {
  return std::abs(da - db) / std::min(da, db) <= ratio;
}

double triangle_area(const geom::Point3& a, const geom::Point3& b, const geom::Point3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace

SceneMesh build_mesh(const DepthRaster& depth, const geom::CameraFrame& cam,
                     double discontinuity_ratio, int threads) {
  if (depth.width() != cam.width || depth.height() != cam.height) {
    throw Error(ErrorCode::DimensionMismatch,
                "depth raster is " + std::to_string(depth.width()) + "x" +
                    std::to_string(depth.height()) + " but camera is " +
                    std::to_string(cam.width) + "x" + std::to_string(cam.height));
  }
  if (!(discontinuity_ratio > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "discontinuity_ratio must be > 0");
  }
  const int w = depth.width();
  const int h = depth.height();
  const auto npix = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);

  std::vector<geom::Point3> lifted(npix, geom::Point3::Zero());
  parallel_for(h, threads, [&](int y) {
    for (int x = 0; x < w; ++x) {
      if (depth.valid(x, y)) {
        lifted[depth.index(x, y)] = geom::unproject(cam, x + 0.5, y + 0.5, depth.at(x, y));
      }
    }
  });

  // Triangles as pixel-index triples, produced per quad row and concatenated
  // in row order so the result is independent of the thread count.
  std::vector<std::vector<std::array<std::size_t, 3>>> rows(static_cast<std::size_t>(std::max(h - 1, 0)));
  parallel_for(h - 1, threads, [&](int y) {
    auto& out = rows[static_cast<std::size_t>(y)];
    auto try_add = [&](std::size_t a, std::size_t b, std::size_t c) {
      const double da = depth.values()[a];
      const double db = depth.values()[b];
      const double dc = depth.values()[c];
      if (!edge_continuous(da, db, discontinuity_ratio) ||
          !edge_continuous(db, dc, discontinuity_ratio) ||
          !edge_continuous(dc, da, discontinuity_ratio)) {
        return;
      }
      if (triangle_area(lifted[a], lifted[b], lifted[c]) <= kMinTriangleArea) return;
      out.push_back({a, b, c});
    };
    for (int x = 0; x + 1 < w; ++x) {
      const std::size_t tl = depth.index(x, y);
      const std::size_t tr = depth.index(x + 1, y);
      const std::size_t bl = depth.index(x, y + 1);
      const std::size_t br = depth.index(x + 1, y + 1);
      if (!depth.valid(x, y) || !depth.valid(x + 1, y) || !depth.valid(x, y + 1) || !depth.valid(x + 1, y + 1)) {
        continue;
      }
      try_add(tl, tr, bl);
      try_add(tr, br, bl);
    }
  });

  std::vector<int> remap(npix, -1);
  for (const auto& row : rows) {
    for (const auto& t : row) {
      for (std::size_t p : t) remap[p] = 0;
    }
  }

  SceneMesh mesh;
  for (std::size_t p = 0; p < npix; ++p) {
    if (remap[p] < 0) continue;
    remap[p] = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(lifted[p]);
    mesh.vertex_source.push_back({static_cast<int>(p % static_cast<std::size_t>(w)),
                                  static_cast<int>(p / static_cast<std::size_t>(w))});
  }
  for (const auto& row : rows) {
    for (const auto& t : row) mesh.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
  }
  if (mesh.triangles.empty()) {
    throw Error(ErrorCode::EmptyMesh, "no triangle survived discontinuity culling");
  }
  return mesh;
}

DepthRaster fill_holes(const DepthRaster& depth, const Mask& hole) {
  const int w = depth.width();
  const int h = depth.height();
  if (hole.width != w || hole.height != h) {
    throw Error(ErrorCode::DimensionMismatch, "hole mask size does not match depth raster");
  }

  DepthRaster out = depth;
  std::vector<std::uint8_t> assigned(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  std::size_t sources = 0;
  std::size_t remaining = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (hole.at(x, y)) {
        out.invalidate(x, y);
        ++remaining;
      } else if (depth.valid(x, y)) {
        assigned[depth.index(x, y)] = 1;
        ++sources;
      }
    }
  }
  if (remaining == 0) return out;
  if (sources == 0) {
    throw Error(ErrorCode::NoBoundaryData, "hole covers every valid pixel");
  }

  constexpr std::array<std::array<int, 2>, 4> kNeighbors{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
  auto has_assigned_neighbor = [&](int x, int y) {
    for (const auto& [dx, dy] : kNeighbors) {
      const int nx = x + dx;
      const int ny = y + dy;
      if (nx >= 0 && ny >= 0 && nx < w && ny < h && assigned[out.index(nx, ny)]) return true;
    }
    return false;
  };

  std::vector<std::array<int, 2>> frontier;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (hole.at(x, y) && has_assigned_neighbor(x, y)) frontier.push_back({x, y});
    }
  }

  std::vector<float> layer_values;
  std::vector<std::uint8_t> queued(assigned.size(), 0);
  while (!frontier.empty()) {
    layer_values.clear();
    for (const auto& [x, y] : frontier) {
      double sum = 0.0;
      int n = 0;
      for (const auto& [dx, dy] : kNeighbors) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx >= 0 && ny >= 0 && nx < w && ny < h && assigned[out.index(nx, ny)]) {
          sum += out.at(nx, ny);
          ++n;
        }
      }
      layer_values.push_back(static_cast<float>(sum / n));
    }
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const auto [x, y] = frontier[i];
      out.set(x, y, layer_values[i]);
      assigned[out.index(x, y)] = 1;
      --remaining;
    }
    std::vector<std::array<int, 2>> next;
    for (const auto& [x, y] : frontier) {
      for (const auto& [dx, dy] : kNeighbors) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const auto idx = out.index(nx, ny);
        if (hole.at(nx, ny) && !assigned[idx] && !queued[idx]) {
          queued[idx] = 1;
          next.push_back({nx, ny});
        }
      }
    }
    frontier = std::move(next);
  }

  if (remaining != 0) {
    throw Error(ErrorCode::NoBoundaryData,
                std::to_string(remaining) + " hole pixels are not connected to valid depth");
  }
  return out;
}

}  // namespace camcond::depthmesh
