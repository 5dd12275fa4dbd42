#include "pitchcam/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "pitchcam/error.hpp"

namespace pitchcam {
namespace {

Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, s, 0, -s, c, 0, 0, 0, 1;
  return r;
}

Mat3 rot_z_derivative(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << -s, c, 0, -c, -s, 0, 0, 0, 0;
  return r;
}

Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << 1, 0, 0, 0, c, s, 0, -s, c;
  return r;
}

Mat3 rot_x_derivative(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << 0, 0, 0, 0, -s, c, 0, -c, -s;
  return r;
}

}  // namespace

Mat3 CameraState::rotation() const { return rotation_from_angles(pan, tilt, roll); }

Eigen::Matrix<double, kNumCameraParams, 1> CameraState::parameters() const {
  Eigen::Matrix<double, kNumCameraParams, 1> p;
  p << focal, k1, pan, tilt, roll, position.x(), position.y(), position.z();
  return p;
}

void CameraState::set_parameters(const Eigen::Matrix<double, kNumCameraParams, 1>& p) {
  focal = p[kFocal];
  k1 = p[kK1];
  pan = p[kPan];
  tilt = p[kTilt];
  roll = p[kRoll];
  position = Vec3(p[kCx], p[kCy], p[kCz]);
}

Mat3 rotation_from_angles(double pan, double tilt, double roll) {
  return rot_z(roll) * rot_x(tilt) * rot_z(pan);
}

EulerAngles angles_from_rotation(const Mat3& r) {
  if (std::abs(r(2, 2)) >= 1.0 - 1e-9) {
    throw Error(ErrorCode::kGimbalLock, "tilt at 0 or pi, pan and roll are indistinguishable");
  }
  EulerAngles a;
  a.tilt = std::acos(r(2, 2));
  a.pan = std::atan2(r(2, 0), -r(2, 1));
  a.roll = std::atan2(r(0, 2), r(1, 2));
  return a;
}

Vec2 distort(const CameraState& cam, const Vec2& normalized) {
  const double scale = 1.0 + cam.k1 * normalized.squaredNorm();
  return cam.focal * scale * normalized + cam.principal_point();
}

CameraProjector::CameraProjector(const CameraState& cam) : cam_(cam) {
  const Mat3 rz_roll = rot_z(cam.roll), rx_tilt = rot_x(cam.tilt), rz_pan = rot_z(cam.pan);
  r_ = rz_roll * rx_tilt * rz_pan;
  dr_pan_ = rz_roll * rx_tilt * rot_z_derivative(cam.pan);
  dr_tilt_ = rz_roll * rot_x_derivative(cam.tilt) * rz_pan;
  dr_roll_ = rot_z_derivative(cam.roll) * rx_tilt * rz_pan;
  const double limit = max_valid_radius(cam);
  limit2_ = limit * limit;
}

std::optional<Vec2> CameraProjector::project(const Vec3& world, ProjectionJacobian* jacobian) const {
  const Vec3 d = world - cam_.position;
  const Vec3 xc = r_ * d;
  if (xc.z() <= kDepthEpsilon) return std::nullopt;

  const double inv_z = 1.0 / xc.z();
  const Vec2 xbar(xc.x() * inv_z, xc.y() * inv_z);
  const double r2 = xbar.squaredNorm();
  const double lens = 1.0 + cam_.k1 * r2;
  const Vec2 pixel = cam_.focal * lens * xbar + cam_.principal_point();

  if (jacobian) {
    Eigen::Matrix<double, 2, 3> dxbar_dxc;
    dxbar_dxc << inv_z, 0, -xbar.x() * inv_z, 0, inv_z, -xbar.y() * inv_z;
    const Eigen::Matrix2d dpix_dxbar =
        cam_.focal * (lens * Eigen::Matrix2d::Identity() + 2.0 * cam_.k1 * xbar * xbar.transpose());
    const Eigen::Matrix<double, 2, 3> dpix_dxc = dpix_dxbar * dxbar_dxc;

    jacobian->col(kFocal) = lens * xbar;
    jacobian->col(kK1) = cam_.focal * r2 * xbar;
    jacobian->col(kPan) = dpix_dxc * (dr_pan_ * d);
    jacobian->col(kTilt) = dpix_dxc * (dr_tilt_ * d);
    jacobian->col(kRoll) = dpix_dxc * (dr_roll_ * d);
    jacobian->block<2, 3>(0, kCx) = -dpix_dxc * r_;
  }
  return pixel;
}

std::optional<Vec2> CameraProjector::project_valid(const Vec3& world, ProjectionJacobian* jacobian) const {
  const Vec3 xc = r_ * (world - cam_.position);
  if (xc.z() <= kDepthEpsilon) return std::nullopt;
  if (xc.x() * xc.x() + xc.y() * xc.y() > limit2_ * xc.z() * xc.z()) return std::nullopt;
  return project(world, jacobian);
}

std::optional<Vec2> project(const CameraState& cam, const Vec3& world, ProjectionJacobian* jacobian) {
  return CameraProjector(cam).project(world, jacobian);
}

double max_valid_radius(const CameraState& cam) {
  const double half_diagonal = 0.5 * std::hypot(cam.image.width, cam.image.height) / cam.focal;
  double limit = 3.0 * half_diagonal;
  if (cam.k1 < 0.0) limit = std::min(limit, 0.95 / std::sqrt(-3.0 * cam.k1));
  return limit;
}

std::optional<Vec2> project_valid(const CameraState& cam, const Vec3& world, ProjectionJacobian* jacobian) {
  return CameraProjector(cam).project_valid(world, jacobian);
}

bool in_image(const ImageSize& image, const Vec2& pixel) {
  return pixel.x() >= 0.0 && pixel.y() >= 0.0 && pixel.x() < image.width && pixel.y() < image.height;
}

Vec2 undistort(const CameraState& cam, const Vec2& pixel) {
  const Vec2 centered = (pixel - cam.principal_point()) / cam.focal;
  const double rd = centered.norm();
  if (rd == 0.0 || cam.k1 == 0.0) return centered;

  double r = rd;
  for (int it = 0; it < 50; ++it) {
    const double slope = 1.0 + 3.0 * cam.k1 * r * r;
    if (slope <= 0.0) break;
    const double step = (r + cam.k1 * r * r * r - rd) / slope;
    r -= step;
    if (!std::isfinite(r) || r < 0.0) break;
    if (std::abs(step) < 1e-10 * std::max(1.0, r)) {
      if (1.0 + 3.0 * cam.k1 * r * r <= 0.0) break;
      return centered * (r / rd);
    }
  }
  throw Error(ErrorCode::kNoConvergence, "pixel outside the invertible radius of the lens model");
}

Ray unproject(const CameraState& cam, const Vec2& pixel) {
  const Vec2 xbar = undistort(cam, pixel);
  const Vec3 dir = cam.rotation().transpose() * Vec3(xbar.x(), xbar.y(), 1.0);
  return {cam.position, dir.normalized()};
}

Vec3 intersect_ground(const Ray& ray) {
  if (std::abs(ray.direction.z()) <= 1e-9) {
    throw Error(ErrorCode::kParallelToGround, "ray does not meet the ground plane");
  }
  const double t = -ray.origin.z() / ray.direction.z();
  if (t <= 0.0) throw Error(ErrorCode::kBehindCamera, "ground plane behind the ray origin");
  Vec3 p = ray.origin + t * ray.direction;
  p.z() = 0.0;
  return p;
}

}  // namespace pitchcam
