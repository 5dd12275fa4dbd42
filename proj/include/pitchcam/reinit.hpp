#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pitchcam/field.hpp"
#include "pitchcam/optimize.hpp"
#include "pitchcam/tripod.hpp"

namespace pitchcam {

struct Correspondence2D3D {
  Vec2 image;
  Vec3 world;
  std::string name;
};

struct ReinitSettings {
  double ransac_threshold_px = 10.0;
  int max_hypotheses = 200;
  double early_exit_inlier_ratio = 0.8;
  int pan_tilt_iterations = 5;
  double pan_tilt_tolerance = 1e-6;
  /// Sum the 1/2 atan terms over all points instead of averaging the angles.
  bool literal_sum = false;
  double min_focal_px = 100.0;
  double max_focal_px = 50000.0;
  std::uint64_t seed = 0;
};

struct ReinitResult {
  CameraState camera;
  CameraState hypothesis;  // best RANSAC hypothesis before the final refine
  std::vector<int> inliers;
  int score = 0;
  bool refined = false;
};

/// Focal length for which the angle between the back-projected rays of the
/// two image points equals the angle subtended at `focal_point` by the two
/// world points (distortion ignored). Throws DegenerateRays or NoRoot.
double estimate_focal_two_points(const Correspondence2D3D& a, const Correspondence2D3D& b, const Vec3& focal_point,
                                 const ImageSize& image, const ReinitSettings& settings = {});

struct PanTilt {
  double pan = 0.0;
  double tilt = 0.0;
};

/// Angles (roll = 0) whose optical axis points from `focal_point` at the
/// barycenter of the world points. Throws BarycenterAtCamera.
PanTilt init_pan_tilt(std::span<const Correspondence2D3D> correspondences, const Vec3& focal_point);

/// Up to settings.pan_tilt_iterations decoupled updates of pan (from x
/// residuals) and tilt (from y residuals); only pan and tilt change.
CameraState refine_pan_tilt(std::span<const Correspondence2D3D> correspondences, const CameraState& cam,
                            const ReinitSettings& settings = {});

/// Two-point RANSAC hypothesis generation with C = rig.T, roll = 0, k1 = 0,
/// then a marking-only refine of the best hypothesis. Throws
/// TooFewCorrespondences (< 2 keypoints) or NoConsensus.
ReinitResult reinitialize(std::span<const Correspondence2D3D> keypoints, const TripodRig& rig,
                          const MarkingPoints& markings, const FieldTemplate& field, const ImageSize& image,
                          const SolverSettings& solver, const SolveToggles& toggles,
                          const ReinitSettings& settings = {});

}  // namespace pitchcam
