#include "camcond/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "camcond/error.hpp"
#include "camcond/parallel.hpp"

namespace camcond::raster {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSubpixelScale = static_cast<double>(1 << kSubpixelBits);
}  // namespace

FrameBuffer::FrameBuffer(int w, int h)
    : width(w), height(h), zbuffer(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), kInf) {}

bool FrameBuffer::covered(int x, int y) const { return depth(x, y) < kInf; }

std::size_t FrameBuffer::covered_count() const {
  return static_cast<std::size_t>(
      std::count_if(zbuffer.begin(), zbuffer.end(), [](double d) { return d < kInf; }));
}

double snap_to_subpixel(double v) { return std::round(v * kSubpixelScale) / kSubpixelScale; }

namespace {

ScreenVertex to_screen(const geom::Intrinsics& k, const geom::Vec3& pc) {
  return ScreenVertex{snap_to_subpixel(k.fx * (pc.x() / pc.z()) + k.cx),
                      snap_to_subpixel(k.fy * (pc.y() / pc.z()) + k.cy), pc.z()};
}

// Sutherland-Hodgman against z >= kNearPlane; returns 0, 3 or 4 vertices.
int clip_near(const std::array<geom::Vec3, 3>& in, std::array<geom::Vec3, 4>& out) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const geom::Vec3& a = in[static_cast<std::size_t>(i)];
    const geom::Vec3& b = in[static_cast<std::size_t>((i + 1) % 3)];
    const bool a_in = a.z() >= kNearPlane;
    const bool b_in = b.z() >= kNearPlane;
    if (a_in) out[static_cast<std::size_t>(n++)] = a;
    if (a_in != b_in) {
      const double t = (kNearPlane - a.z()) / (b.z() - a.z());
      geom::Vec3 p = a + t * (b - a);
      p.z() = kNearPlane;
      out[static_cast<std::size_t>(n++)] = p;
    }
  }
  return n;
}

}  // namespace

std::vector<ScreenTriangle> project_triangles(const depthmesh::SceneMesh& mesh,
                                              const geom::CameraFrame& cam) {
  const geom::Mat3 r = cam.extrinsics.rotation_matrix();
  const geom::Vec3& t = cam.extrinsics.translation;
  std::vector<geom::Vec3> camera_space(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) camera_space[i] = r * mesh.vertices[i] + t;

  std::vector<ScreenTriangle> out;
  out.reserve(mesh.triangles.size());
  for (const auto& tri : mesh.triangles) {
    const std::array<geom::Vec3, 3> pc{camera_space[static_cast<std::size_t>(tri[0])],
                                       camera_space[static_cast<std::size_t>(tri[1])],
                                       camera_space[static_cast<std::size_t>(tri[2])]};
    if (pc[0].z() >= kNearPlane && pc[1].z() >= kNearPlane && pc[2].z() >= kNearPlane) {
      out.push_back({to_screen(cam.intrinsics, pc[0]), to_screen(cam.intrinsics, pc[1]),
                     to_screen(cam.intrinsics, pc[2])});
      continue;
    }
    std::array<geom::Vec3, 4> poly;
    const int n = clip_near(pc, poly);
    for (int i = 1; i + 1 < n; ++i) {
      out.push_back({to_screen(cam.intrinsics, poly[0]),
                     to_screen(cam.intrinsics, poly[static_cast<std::size_t>(i)]),
                     to_screen(cam.intrinsics, poly[static_cast<std::size_t>(i + 1)])});
    }
  }
  return out;
}

namespace {

double edge_function(const ScreenVertex& a, const ScreenVertex& b, const ScreenVertex& p) {
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

simd::Edge make_edge(const ScreenVertex& a, const ScreenVertex& b) {
  simd::Edge e;
  e.ax = a.x;
  e.ay = a.y;
  e.dx = b.x - a.x;
  e.dy = b.y - a.y;
  // With y pointing down and positive area, interior lies where the edge
  // function is positive: top edges run rightward, left edges run upward.
  e.top_left = e.dy < 0.0 || (e.dy == 0.0 && e.dx > 0.0);
  return e;
}

}  // namespace

std::optional<simd::TriangleSetup> make_setup(const ScreenTriangle& tri) {
  ScreenVertex v0 = tri[0];
  ScreenVertex v1 = tri[1];
  ScreenVertex v2 = tri[2];
  double area = edge_function(v1, v2, v0);
  if (area == 0.0 || !std::isfinite(area)) return std::nullopt;
  if (area < 0.0) {
    std::swap(v1, v2);
    area = -area;
  }
  simd::TriangleSetup s;
  s.edges = {make_edge(v1, v2), make_edge(v2, v0), make_edge(v0, v1)};
  s.inv_depth = {1.0 / v0.depth, 1.0 / v1.depth, 1.0 / v2.depth};
  s.area = area;
  return s;
}

FrameBuffer rasterize_mesh_depth(const depthmesh::SceneMesh& mesh, const geom::CameraFrame& cam,
                                 const RasterOptions& options) {
  FrameBuffer fb(cam.width, cam.height);
  const std::vector<ScreenTriangle> screen = project_triangles(mesh, cam);

  struct Job {
    simd::TriangleSetup setup;
    int x0, x1, y0, y1;  // half-open pixel bounds
  };
  std::vector<Job> jobs;
  jobs.reserve(screen.size());
  for (const auto& tri : screen) {
    const auto setup = make_setup(tri);
    if (!setup) continue;
    const double min_x = std::min({tri[0].x, tri[1].x, tri[2].x});
    const double max_x = std::max({tri[0].x, tri[1].x, tri[2].x});
    const double min_y = std::min({tri[0].y, tri[1].y, tri[2].y});
    const double max_y = std::max({tri[0].y, tri[1].y, tri[2].y});
    if (max_x < 0.0 || max_y < 0.0 || min_x > cam.width || min_y > cam.height) continue;
    Job job;
    job.setup = *setup;
    job.x0 = static_cast<int>(std::max(0.0, std::floor(min_x - 0.5)));
    job.x1 = static_cast<int>(std::min<double>(cam.width, std::ceil(max_x)));
    job.y0 = static_cast<int>(std::max(0.0, std::floor(min_y - 0.5)));
    job.y1 = static_cast<int>(std::min<double>(cam.height, std::ceil(max_y)));
    if (job.x0 < job.x1 && job.y0 < job.y1) jobs.push_back(job);
  }

  const simd::Kernels& k = simd::kernels();
  // Rows are independent: each band walks every triangle in mesh order.
  const int threads = options.threads <= 0 ? default_thread_count() : options.threads;
  const int bands = std::min(threads, cam.height);
  parallel_for(bands, bands, [&](int band) {
    const int row_begin = static_cast<int>(static_cast<long long>(cam.height) * band / bands);
    const int row_end = static_cast<int>(static_cast<long long>(cam.height) * (band + 1) / bands);
    for (const Job& job : jobs) {
      const int y0 = std::max(job.y0, row_begin);
      const int y1 = std::min(job.y1, row_end);
      for (int y = y0; y < y1; ++y) {
        double* zrow = fb.zbuffer.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(cam.width);
        k.raster_span(job.setup, static_cast<double>(y) + 0.5, job.x0, job.x1, zrow);
      }
    }
  });
  return fb;
}

DepthRange depth_extrema(std::span<const FrameBuffer> frames) {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& f : frames) {
    for (double d : f.zbuffer) {
      if (!(d < kInf)) continue;
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  if (!(lo < kInf)) throw Error(ErrorCode::AllUncovered, "no covered pixel in the depth sequence");
  return DepthRange{lo, hi};
}

Image normalize_depth_frame(const FrameBuffer& frame, const DepthRange& range,
                            DepthPolarity polarity) {
  Image out(frame.width, frame.height, 1);
  if (range.max > range.min) {
    const simd::Kernels& k = simd::kernels();
    for (int y = 0; y < frame.height; ++y) {
      const auto offset = static_cast<std::size_t>(y) * static_cast<std::size_t>(frame.width);
      k.normalize_row(frame.zbuffer.data() + offset, frame.width, range.min, range.max,
                      out.pixels.data() + offset);
    }
    if (polarity == DepthPolarity::FarBright) {
      for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        if (frame.zbuffer[i] < kInf) out.pixels[i] = static_cast<std::uint8_t>(255 - out.pixels[i]);
      }
    }
  } else {
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
      out.pixels[i] = frame.zbuffer[i] < kInf ? 255 : 0;
    }
  }
  return out;
}

std::vector<Image> normalize_depth(std::span<const FrameBuffer> frames, DepthPolarity polarity) {
  const DepthRange range = depth_extrema(frames);
  std::vector<Image> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(normalize_depth_frame(f, range, polarity));
  return out;
}

const std::vector<Rgb>& body18_palette() {
  static const std::vector<Rgb> palette{
      {255, 0, 0},   {255, 85, 0},  {255, 170, 0}, {255, 255, 0}, {170, 255, 0}, {85, 255, 0},
      {0, 255, 0},   {0, 255, 85},  {0, 255, 170}, {0, 255, 255}, {0, 170, 255}, {0, 85, 255},
      {0, 0, 255},   {85, 0, 255},  {170, 0, 255}, {255, 0, 255}, {255, 0, 170}};
  return palette;
}

SkeletonStyle body18_style() {
  SkeletonStyle style;
  style.limbs = motion::body18_skeleton().limbs;
  const auto& palette = body18_palette();
  for (std::size_t i = 0; i < style.limbs.size(); ++i) {
    style.limb_colors.push_back(palette[i % palette.size()]);
  }
  for (std::size_t j = 0; j < 18; ++j) style.joint_colors.push_back(palette[j % palette.size()]);
  return style;
}

void validate(const SkeletonStyle& style, int num_joints) {
  if (!(style.limb_thickness >= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "limb thickness must be >= 1");
  }
  if (!(style.joint_radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "joint radius must be >= 0");
  if (style.limb_colors.size() != style.limbs.size()) {
    throw Error(ErrorCode::InvalidArgument, "one color per limb required");
  }
  if (style.draw_joints && static_cast<int>(style.joint_colors.size()) < num_joints) {
    throw Error(ErrorCode::InvalidArgument, "one color per joint required");
  }
  for (const auto& limb : style.limbs) {
    for (int j : limb) {
      if (j < 0 || j >= num_joints) {
        throw Error(ErrorCode::InvalidArgument,
                    "limb references joint " + std::to_string(j) + " outside the skeleton");
      }
    }
  }
}

namespace {

void paint(Image& img, int x, int y, const Rgb& c) {
  std::uint8_t* p = img.at(x, y);
  p[0] = c[0];
  p[1] = c[1];
  p[2] = c[2];
}

using PixelPos = std::array<long long, 2>;

// Integer pixel positions keep every coverage test exact.
void draw_segment(Image& img, const PixelPos& a, const PixelPos& b, double radius, const Rgb& c) {
  const long long reach = static_cast<long long>(std::ceil(radius));
  const long long x0 = std::max(0LL, std::min(a[0], b[0]) - reach);
  const long long x1 = std::min<long long>(img.width - 1, std::max(a[0], b[0]) + reach);
  const long long y0 = std::max(0LL, std::min(a[1], b[1]) - reach);
  const long long y1 = std::min<long long>(img.height - 1, std::max(a[1], b[1]) + reach);
  const long long abx = b[0] - a[0];
  const long long aby = b[1] - a[1];
  const long long len2 = abx * abx + aby * aby;
  const double r2 = radius * radius;
  for (long long y = y0; y <= y1; ++y) {
    for (long long x = x0; x <= x1; ++x) {
      const long long apx = x - a[0];
      const long long apy = y - a[1];
      const long long dot = apx * abx + apy * aby;
      bool hit;
      if (len2 == 0 || dot <= 0) {
        hit = static_cast<double>(apx * apx + apy * apy) <= r2;
      } else if (dot >= len2) {
        const long long bpx = x - b[0];
        const long long bpy = y - b[1];
        hit = static_cast<double>(bpx * bpx + bpy * bpy) <= r2;
      } else {
        const double cross = static_cast<double>(apx * aby - apy * abx);
        hit = cross * cross <= r2 * static_cast<double>(len2);
      }
      if (hit) paint(img, static_cast<int>(x), static_cast<int>(y), c);
    }
  }
}

void draw_disc(Image& img, const PixelPos& center, double radius, const Rgb& c) {
  const long long reach = static_cast<long long>(std::ceil(radius));
  const long long x0 = std::max(0LL, center[0] - reach);
  const long long x1 = std::min<long long>(img.width - 1, center[0] + reach);
  const long long y0 = std::max(0LL, center[1] - reach);
  const long long y1 = std::min<long long>(img.height - 1, center[1] + reach);
  const double r2 = radius * radius;
  for (long long y = y0; y <= y1; ++y) {
    for (long long x = x0; x <= x1; ++x) {
      const long long dx = x - center[0];
      const long long dy = y - center[1];
      if (static_cast<double>(dx * dx + dy * dy) <= r2) paint(img, static_cast<int>(x), static_cast<int>(y), c);
    }
  }
}

}  // namespace

Image rasterize_skeleton(std::span<const geom::Point3> joints, const geom::CameraFrame& cam,
                         const SkeletonStyle& style, std::span<const std::uint8_t> valid) {
  validate(style, static_cast<int>(joints.size()));
  if (!valid.empty() && valid.size() != joints.size()) {
    throw Error(ErrorCode::ShapeMismatch, "joint validity length differs from joint count");
  }
  Image img(cam.width, cam.height, 3);

  std::vector<std::optional<PixelPos>> pixel(joints.size());
  for (std::size_t j = 0; j < joints.size(); ++j) {
    if (!valid.empty() && !valid[j]) continue;
    const geom::Vec3 pc = cam.extrinsics.to_camera(joints[j]);
    if (!(pc.z() > geom::kMinProjectDepth)) continue;
    const geom::PixelDepth p = geom::project_camera_space(cam.intrinsics, pc);
    if (!(std::abs(p.u) <= kMaxJointPixel) || !(std::abs(p.v) <= kMaxJointPixel)) continue;
    pixel[j] = PixelPos{static_cast<long long>(std::floor(p.u)), static_cast<long long>(std::floor(p.v))};
  }

  const double limb_radius = 0.5 * style.limb_thickness;
  for (std::size_t l = 0; l < style.limbs.size(); ++l) {
    const auto& a = pixel[static_cast<std::size_t>(style.limbs[l][0])];
    const auto& b = pixel[static_cast<std::size_t>(style.limbs[l][1])];
    if (a && b) draw_segment(img, *a, *b, limb_radius, style.limb_colors[l]);
  }
  if (style.draw_joints) {
    for (std::size_t j = 0; j < joints.size(); ++j) {
      if (pixel[j]) draw_disc(img, *pixel[j], style.joint_radius, style.joint_colors[j]);
    }
  }
  return img;
}

Image compose_conditions(const Image& depth_gray, const Image& pose_rgb) {
  if (depth_gray.width != pose_rgb.width || depth_gray.height != pose_rgb.height ||
      depth_gray.channels != 1 || pose_rgb.channels != 3) {
    throw Error(ErrorCode::DimensionMismatch,
                "compose_conditions expects equal-size gray depth and RGB pose frames");
  }
  Image out(pose_rgb.width, pose_rgb.height, 3);
  const std::size_t n = static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* p = pose_rgb.pixels.data() + 3 * i;
    std::uint8_t* o = out.pixels.data() + 3 * i;
    if (p[0] | p[1] | p[2]) {
      o[0] = p[0];
      o[1] = p[1];
      o[2] = p[2];
    } else {
      o[0] = o[1] = o[2] = depth_gray.pixels[i];
    }
  }
  return out;
}

RenderedSequence render_sequence(const depthmesh::SceneMesh& mesh,
                                 const motion::MotionSequence& motion,
                                 std::span<const geom::CameraFrame> trajectory,
                                 const SkeletonStyle& style, const SequenceOptions& options) {
  if (static_cast<int>(trajectory.size()) != motion.num_frames()) {
    throw Error(ErrorCode::LengthMismatch,
                "trajectory has " + std::to_string(trajectory.size()) + " frames but motion has " +
                    std::to_string(motion.num_frames()));
  }
  if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "cannot render an empty scene mesh");
  validate(style, motion.num_joints());

  const int t = static_cast<int>(trajectory.size());
  RenderedSequence out;
  out.pose.resize(static_cast<std::size_t>(t));
  std::vector<FrameBuffer> depth_frames(static_cast<std::size_t>(t));
  parallel_for(t, options.threads, [&](int i) {
    const auto idx = static_cast<std::size_t>(i);
    depth_frames[idx] = rasterize_mesh_depth(mesh, trajectory[idx]);
    const std::span<const std::uint8_t> valid =
        motion.valid.empty() ? std::span<const std::uint8_t>{} : std::span<const std::uint8_t>(motion.valid[idx]);
    out.pose[idx] = rasterize_skeleton(motion.frames[idx], trajectory[idx], style, valid);
  });

  out.range = depth_extrema(depth_frames);
  out.depth.resize(static_cast<std::size_t>(t));
  out.pose_depth.resize(static_cast<std::size_t>(t));
  parallel_for(t, options.threads, [&](int i) {
    const auto idx = static_cast<std::size_t>(i);
    out.depth[idx] = normalize_depth_frame(depth_frames[idx], out.range, options.polarity);
    out.pose_depth[idx] = compose_conditions(out.depth[idx], out.pose[idx]);
  });
  return out;
}

}  // namespace camcond::raster
