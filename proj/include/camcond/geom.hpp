#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace camcond::geom {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;
using Point3 = Vec3;

/// Pinhole intrinsics with zero skew.
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  [[nodiscard]] Mat3 matrix() const;
  [[nodiscard]] Mat3 inverse_matrix() const;

  bool operator==(const Intrinsics&) const = default;
};

/// World-to-camera rigid transform: x_cam = R * x_world + t.
///
/// The rotation is kept as a unit quaternion; the matrix form is derived on
/// demand. Callers that build an Extrinsics from arbitrary data should go
/// through make_extrinsics() so the quaternion is normalized.
struct Extrinsics {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  [[nodiscard]] Mat3 rotation_matrix() const { return rotation.toRotationMatrix(); }
  [[nodiscard]] Vec3 to_camera(const Vec3& world) const;
  [[nodiscard]] Vec3 to_world(const Vec3& camera) const;
  /// Camera center in world coordinates, -R^T t.
  [[nodiscard]] Vec3 center() const;
  [[nodiscard]] Extrinsics inverse() const;

  bool operator==(const Extrinsics& other) const;
};

Extrinsics make_extrinsics(const Quat& rotation, const Vec3& translation);

/// Builds world-to-camera extrinsics from a camera-to-world pose.
Extrinsics from_camera_to_world(const Quat& rotation_c2w, const Vec3& center);

/// Camera at `eye` looking at `target`; camera +y points away from `up`
/// (image rows grow downward), camera +z is the viewing direction.
Extrinsics look_at(const Vec3& eye, const Vec3& target, const Vec3& up = Vec3::UnitY());

/// Returns the transform x -> outer(inner(x)).
Extrinsics compose(const Extrinsics& outer, const Extrinsics& inner);

struct CameraFrame {
  Intrinsics intrinsics;
  Extrinsics extrinsics;
  int width = 1;
  int height = 1;

  bool operator==(const CameraFrame&) const = default;
};

/// Throws InvalidArgument when focal lengths or image size are invalid.
void validate(const CameraFrame& cam);

/// Principal point inside [0,W)x[0,H). Violations are legal (cropped virtual
/// cameras) and only worth a warning.
bool principal_point_inside(const CameraFrame& cam);

struct PixelDepth {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

/// Minimum camera-space depth accepted by project().
inline constexpr double kMinProjectDepth = 1e-9;

PixelDepth project(const CameraFrame& cam, const Point3& world);
PixelDepth project_camera_space(const Intrinsics& intrinsics, const Vec3& camera_point);
Point3 unproject(const CameraFrame& cam, double u, double v, double depth);

/// Rotation by shortest-arc slerp, camera center by linear interpolation.
/// alpha = 0 and alpha = 1 return the endpoints unchanged.
Extrinsics interpolate_pose(const Extrinsics& a, const Extrinsics& b, double alpha);

/// Angle in radians of the relative rotation between two orientations.
double rotation_angle(const Quat& a, const Quat& b);

}  // namespace camcond::geom
