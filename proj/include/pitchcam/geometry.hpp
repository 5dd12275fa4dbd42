#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>

namespace pitchcam {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// World frame: origin at the pitch center, x along the pitch length, y along
// the width, z pointing down. Cameras above the ground have negative z.

struct ImageSize {
  int width = 1920;
  int height = 1080;

  bool operator==(const ImageSize&) const = default;
};

/// Index of each estimated quantity inside an 8-vector of camera parameters.
enum CameraParam : int {
  kFocal = 0,
  kK1,
  kPan,
  kTilt,
  kRoll,
  kCx,
  kCy,
  kCz,
  kNumCameraParams
};

/// Broadcast camera: square pixels, principal point at the image center, one
/// radial distortion coefficient. Angles are radians, the focal point C is in
/// meters and the focal length in pixels.
struct CameraState {
  double focal = 2000.0;
  double k1 = 0.0;
  double pan = 0.0;
  double tilt = 1.35;
  double roll = 0.0;
  Vec3 position = Vec3(0.0, 55.0, -12.0);
  ImageSize image;

  Vec2 principal_point() const { return {0.5 * image.width, 0.5 * image.height}; }
  Mat3 rotation() const;

  /// Packs (f, k1, pan, tilt, roll, Cx, Cy, Cz).
  Eigen::Matrix<double, kNumCameraParams, 1> parameters() const;
  void set_parameters(const Eigen::Matrix<double, kNumCameraParams, 1>& p);
};

struct EulerAngles {
  double pan = 0.0;
  double tilt = 0.0;
  double roll = 0.0;
};

/// R = Rz(roll) * Rx(tilt) * Rz(pan), with the elementary matrices
///   Rz(a) = [[c, s, 0], [-s, c, 0], [0, 0, 1]]
///   Rx(a) = [[1, 0, 0], [0, c, s], [0, -s, c]].
/// R maps world directions into the camera frame. The rows of R (columns of
/// R^T) are r1 (image x), r2 (image y, i.e. -r2 is "up") and r3 (optical axis).
Mat3 rotation_from_angles(double pan, double tilt, double roll);

/// Inverse of rotation_from_angles with tilt in (0, pi). Throws GimbalLock
/// when |R(2,2)| >= 1 - 1e-9.
EulerAngles angles_from_rotation(const Mat3& rotation);

inline constexpr double kDepthEpsilon = 1e-6;

using ProjectionJacobian = Eigen::Matrix<double, 2, kNumCameraParams>;

/// Pixel of a world point, or nullopt when the camera-frame depth is at most
/// kDepthEpsilon. The optional Jacobian is taken with respect to the eight
/// parameters in CameraParam order (natural units).
std::optional<Vec2> project(const CameraState& cam, const Vec3& world,
                            ProjectionJacobian* jacobian = nullptr);

/// Applies the radial model to normalized coordinates: f * (1 + k1 r^2) * x + p.
Vec2 distort(const CameraState& cam, const Vec2& normalized);

/// Normalized coordinates whose distorted projection is `pixel`. Newton on
/// the scalar radius; throws NoConvergence after 50 iterations or when the
/// radius leaves the region where r * (1 + k1 r^2) is monotone.
Vec2 undistort(const CameraState& cam, const Vec2& pixel);

/// Largest normalized radius for which projections are trusted: three image
/// half-diagonals, and never past the fold of r * (1 + k1 r^2) for k1 < 0.
double max_valid_radius(const CameraState& cam);

/// Projection that also rejects points beyond max_valid_radius. Used wherever
/// projected geometry is rendered or searched.
std::optional<Vec2> project_valid(const CameraState& cam, const Vec3& world,
                                  ProjectionJacobian* jacobian = nullptr);

bool in_image(const ImageSize& image, const Vec2& pixel);

/// Precomputes the rotation (and its derivatives) of one camera for
/// projecting many points; results are identical to project/project_valid.
class CameraProjector {
 public:
  explicit CameraProjector(const CameraState& cam);

  std::optional<Vec2> project(const Vec3& world, ProjectionJacobian* jacobian = nullptr) const;
  std::optional<Vec2> project_valid(const Vec3& world, ProjectionJacobian* jacobian = nullptr) const;

  const CameraState& camera() const { return cam_; }
  const Mat3& rotation() const { return r_; }

 private:
  CameraState cam_;
  Mat3 r_;
  Mat3 dr_pan_;
  Mat3 dr_tilt_;
  Mat3 dr_roll_;
  double limit2_;
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit
};

Ray unproject(const CameraState& cam, const Vec2& pixel);

/// Point where the ray meets z = 0. Throws ParallelToGround or BehindCamera.
Vec3 intersect_ground(const Ray& ray);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace pitchcam
