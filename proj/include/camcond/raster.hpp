#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "camcond/depthmesh.hpp"
#include "camcond/geom.hpp"
#include "camcond/image.hpp"
#include "camcond/motion_fit.hpp"
#include "camcond/simd/kernels.hpp"

namespace camcond::raster {

/// Depth render target; +inf marks an uncovered pixel.
struct FrameBuffer {
  int width = 0;
  int height = 0;
  std::vector<double> zbuffer;

  FrameBuffer() = default;
  FrameBuffer(int w, int h);

  [[nodiscard]] double depth(int x, int y) const {
    return zbuffer[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
  [[nodiscard]] bool covered(int x, int y) const;
  [[nodiscard]] std::size_t covered_count() const;
};

/// Screen positions are snapped to 1/2^kSubpixelBits of a pixel before scan
/// conversion so shared edges are evaluated identically by both triangles.
inline constexpr int kSubpixelBits = 8;
/// Camera-space near plane (meters) used for clipping.
inline constexpr double kNearPlane = 1e-3;

double snap_to_subpixel(double v);

struct ScreenVertex {
  double x = 0.0;  // snapped pixel coordinates
  double y = 0.0;
  double depth = 0.0;  // camera-space z
};
using ScreenTriangle = std::array<ScreenVertex, 3>;

/// Clips every mesh triangle against the near plane and projects the pieces
/// to snapped screen space, in mesh order.
std::vector<ScreenTriangle> project_triangles(const depthmesh::SceneMesh& mesh,
                                              const geom::CameraFrame& cam);

/// Edge setup for the scan-conversion kernels; nullopt for zero-area input.
std::optional<simd::TriangleSetup> make_setup(const ScreenTriangle& tri);

struct RasterOptions {
  int threads = 1;
};

/// Z-buffered, perspective-correct fill of every triangle. A pixel is covered
/// when its center lies strictly inside or on a top/left edge; depth is the
/// nearest covering fragment's interpolated camera-space z.
FrameBuffer rasterize_mesh_depth(const depthmesh::SceneMesh& mesh, const geom::CameraFrame& cam,
                                 const RasterOptions& options = {});

enum class DepthPolarity { NearBright, FarBright };

struct DepthRange {
  double min = 0.0;
  double max = 0.0;
};

/// Extrema over covered pixels of all frames. Throws AllUncovered.
DepthRange depth_extrema(std::span<const FrameBuffer> frames);

/// gray = round(255 * (max - d) / (max - min)) on covered pixels (near =
/// bright), 0 on uncovered pixels, 255 everywhere covered when the range is
/// degenerate. FarBright returns 255 minus that value on covered pixels.
Image normalize_depth_frame(const FrameBuffer& frame, const DepthRange& range,
                            DepthPolarity polarity = DepthPolarity::NearBright);

/// Normalizes a whole sequence against its shared extrema.
std::vector<Image> normalize_depth(std::span<const FrameBuffer> frames,
                                   DepthPolarity polarity = DepthPolarity::NearBright);

using Rgb = std::array<std::uint8_t, 3>;

struct SkeletonStyle {
  std::vector<std::array<int, 2>> limbs;
  std::vector<Rgb> limb_colors;
  std::vector<Rgb> joint_colors;
  double joint_radius = 4.0;
  double limb_thickness = 4.0;
  bool draw_joints = true;
};

/// The fixed 17-color palette cycled over limbs and joints.
const std::vector<Rgb>& body18_palette();

/// Limb pairs of the 18-joint body convention with the cycling palette.
SkeletonStyle body18_style();

/// Throws InvalidArgument when the style cannot render a J-joint skeleton.
void validate(const SkeletonStyle& style, int num_joints);

/// Joints projecting farther than this from the image origin (pixels) are
/// skipped like joints behind the camera.
inline constexpr double kMaxJointPixel = 1048576.0;

/// Draws limbs (in style order) then joints on a black RGB frame. Joints
/// behind the camera, or flagged invalid, are skipped along with their limbs.
/// Geometry is evaluated on integer pixel positions floor(u), floor(v): a
/// limb covers pixels within limb_thickness / 2 of the segment, a joint
/// covers pixels within joint_radius of its position.
Image rasterize_skeleton(std::span<const geom::Point3> joints, const geom::CameraFrame& cam,
                         const SkeletonStyle& style, std::span<const std::uint8_t> valid = {});

/// Gray depth replicated to RGB, overwritten by every non-black pose pixel.
Image compose_conditions(const Image& depth_gray, const Image& pose_rgb);

struct RenderedSequence {
  std::vector<Image> pose;        // c_pose
  std::vector<Image> pose_depth;  // c_pose+depth
  std::vector<Image> depth;       // normalized mesh depth alone
  DepthRange range;
};

struct SequenceOptions {
  int threads = 1;
  DepthPolarity polarity = DepthPolarity::NearBright;
};

/// Renders both control signals for every trajectory frame. Depth
/// normalization uses extrema over the whole sequence.
RenderedSequence render_sequence(const depthmesh::SceneMesh& mesh,
                                 const motion::MotionSequence& motion,
                                 std::span<const geom::CameraFrame> trajectory,
                                 const SkeletonStyle& style, const SequenceOptions& options = {});

}  // namespace camcond::raster
