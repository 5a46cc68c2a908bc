#include "camcond/geom.hpp"

#include <cmath>
#include <string>

#include "camcond/error.hpp"

namespace camcond::geom {

Mat3 Intrinsics::matrix() const {
  Mat3 k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Mat3 Intrinsics::inverse_matrix() const {
  Mat3 k;
  k << 1.0 / fx, 0.0, -cx / fx, 0.0, 1.0 / fy, -cy / fy, 0.0, 0.0, 1.0;
  return k;
}

Vec3 Extrinsics::to_camera(const Vec3& world) const {
  return rotation_matrix() * world + translation;
}

Vec3 Extrinsics::to_world(const Vec3& camera) const {
  return rotation_matrix().transpose() * (camera - translation);
}

Vec3 Extrinsics::center() const { return -(rotation_matrix().transpose() * translation); }

Extrinsics Extrinsics::inverse() const {
  Extrinsics inv;
  inv.rotation = rotation.conjugate();
  inv.translation = -(inv.rotation_matrix() * translation);
  return inv;
}

bool Extrinsics::operator==(const Extrinsics& other) const {
  return rotation.coeffs() == other.rotation.coeffs() && translation == other.translation;
}

Extrinsics make_extrinsics(const Quat& rotation, const Vec3& translation) {
  const double n = rotation.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::InvalidArgument, "rotation quaternion has zero or non-finite norm");
  }
  if (!translation.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "translation is not finite");
  }
  return Extrinsics{rotation.normalized(), translation};
}

Extrinsics from_camera_to_world(const Quat& rotation_c2w, const Vec3& center) {
  const Quat q = rotation_c2w.normalized().conjugate();
  return Extrinsics{q, -(q.toRotationMatrix() * center)};
}

Extrinsics look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "look_at: view direction parallel to up vector");
  }
  right.normalize();
  const Vec3 down = forward.cross(right);
  // Rows of the world->camera rotation are the camera axes in world frame.
  Mat3 r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  const Quat q(r);
  return Extrinsics{q.normalized(), -(q.normalized().toRotationMatrix() * eye)};
}

Extrinsics compose(const Extrinsics& outer, const Extrinsics& inner) {
  Extrinsics out;
  out.rotation = (outer.rotation * inner.rotation).normalized();
  out.translation = outer.rotation_matrix() * inner.translation + outer.translation;
  return out;
}

void validate(const CameraFrame& cam) {
  const auto& k = cam.intrinsics;
  if (!(k.fx > 0.0) || !(k.fy > 0.0) || !std::isfinite(k.fx) || !std::isfinite(k.fy)) {
    throw Error(ErrorCode::InvalidArgument, "focal lengths must be finite and positive");
  }
  if (!std::isfinite(k.cx) || !std::isfinite(k.cy)) {
    throw Error(ErrorCode::InvalidArgument, "principal point must be finite");
  }
  if (cam.width < 1 || cam.height < 1) {
    throw Error(ErrorCode::InvalidArgument, "image size must be at least 1x1, got " +
                                                std::to_string(cam.width) + "x" +
                                                std::to_string(cam.height));
  }
  if (std::abs(cam.extrinsics.rotation.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "rotation quaternion is not unit norm");
  }
}

bool principal_point_inside(const CameraFrame& cam) {
  const auto& k = cam.intrinsics;
  return k.cx >= 0.0 && k.cx < cam.width && k.cy >= 0.0 && k.cy < cam.height;
}

PixelDepth project_camera_space(const Intrinsics& k, const Vec3& pc) {
  if (!(pc.z() > kMinProjectDepth)) {
    throw Error(ErrorCode::BehindCamera,
                "camera-space depth " + std::to_string(pc.z()) + " is not in front of the camera");
  }
  return PixelDepth{k.fx * (pc.x() / pc.z()) + k.cx, k.fy * (pc.y() / pc.z()) + k.cy, pc.z()};
}

PixelDepth project(const CameraFrame& cam, const Point3& world) {
  return project_camera_space(cam.intrinsics, cam.extrinsics.to_camera(world));
}

Point3 unproject(const CameraFrame& cam, double u, double v, double depth) {
  if (!(depth > 0.0)) {
    throw Error(ErrorCode::NonPositiveDepth, "depth " + std::to_string(depth) + " must be > 0");
  }
  const auto& k = cam.intrinsics;
  const Vec3 pc((u - k.cx) / k.fx * depth, (v - k.cy) / k.fy * depth, depth);
  return cam.extrinsics.to_world(pc);
}

Extrinsics interpolate_pose(const Extrinsics& a, const Extrinsics& b, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0,1]");
  }
  if (alpha == 0.0) return a;
  if (alpha == 1.0) return b;

  // Eigen's slerp already takes the shorter arc when the dot product is negative.
  const Quat q = a.rotation.slerp(alpha, b.rotation).normalized();
  const Vec3 center = (1.0 - alpha) * a.center() + alpha * b.center();
  return Extrinsics{q, -(q.toRotationMatrix() * center)};
}

double rotation_angle(const Quat& a, const Quat& b) {
  return a.angularDistance(b);
}

}  // namespace camcond::geom
