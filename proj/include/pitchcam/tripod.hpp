#pragma once

#include <span>

#include "pitchcam/geometry.hpp"
#include "pitchcam/lm.hpp"

namespace pitchcam {

/// Pan-tilt head mounted on a tripod: the pan and tilt axes meet at `center`
/// (T), and the optical axis passes at distance `offset` (delta) from it.
struct TripodRig {
  Vec3 center = Vec3(0.0, 55.0, -12.0);
  double offset = 0.0;
};

struct TripodDerived {
  Vec3 axis_point;  // O*: orthogonal projection of T onto the optical axis
  double lambda = 0.0;  // signed distance from O* to C along r3
};

TripodDerived optical_axis_point(const CameraState& cam, const TripodRig& rig);

/// delta - |O* - T|, signed. The optional Jacobian is with respect to the
/// eight camera parameters; it is zero when O* coincides with T.
double tripod_residual(const CameraState& cam, const TripodRig& rig,
                       Eigen::Matrix<double, 1, kNumCameraParams>* jacobian = nullptr);

/// Camera satisfying the head model exactly: C = T - delta * r2 + lambda * r3.
CameraState camera_on_rig(const TripodRig& rig, double pan, double tilt, double roll, double lambda,
                          double focal, double k1, const ImageSize& image);

struct FitRigSettings {
  int min_cameras = 10;
  double min_pan_span = deg2rad(2.0);
  double min_tilt_span = deg2rad(0.5);
  double initial_offset = 0.3;
  LmSettings lm;
};

/// Least-squares (T, delta) over a set of estimated cameras, started from the
/// mean focal point with delta = 0.3 m and from the linear rig solution; the
/// lower final cost wins. Throws InsufficientDiversity when the
/// cameras do not sweep enough pan and tilt for the axis geometry to be
/// observable.
TripodRig fit_rig(std::span<const CameraState> cameras, const FitRigSettings& settings = {});

}  // namespace pitchcam
