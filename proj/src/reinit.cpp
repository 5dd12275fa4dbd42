#include "pitchcam/reinit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pitchcam/error.hpp"

namespace pitchcam {
namespace {

double image_ray_cosine(const Vec2& a, const Vec2& b, double f) {
  const Vec3 ra(a.x(), a.y(), f), rb(b.x(), b.y(), f);
  return ra.dot(rb) / (ra.norm() * rb.norm());
}

struct Hypothesis {
  CameraState camera;
  std::vector<int> inliers;
  double inlier_mre = std::numeric_limits<double>::infinity();
  int index = -1;
};

Hypothesis score_hypothesis(const CameraState& cam, std::span<const Correspondence2D3D> keypoints, double threshold,
                            int index) {
  Hypothesis h;
  h.camera = cam;
  h.index = index;
  const CameraProjector projector(cam);
  double sum = 0.0;
  for (std::size_t i = 0; i < keypoints.size(); ++i) {
    const auto px = projector.project(keypoints[i].world);
    if (!px) continue;
    const double err = (*px - keypoints[i].image).norm();
    if (err < threshold) {
      h.inliers.push_back(static_cast<int>(i));
      sum += err;
    }
  }
  if (!h.inliers.empty()) h.inlier_mre = sum / h.inliers.size();
  return h;
}

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.inliers.size() != b.inliers.size()) return a.inliers.size() > b.inliers.size();
  if (a.inlier_mre != b.inlier_mre) return a.inlier_mre < b.inlier_mre;
  return a.index < b.index;
}

}  // namespace

double estimate_focal_two_points(const Correspondence2D3D& a, const Correspondence2D3D& b, const Vec3& focal_point,
                                 const ImageSize& image, const ReinitSettings& settings) {
  const Vec3 wa = a.world - focal_point, wb = b.world - focal_point;
  if ((a.world - b.world).norm() < 1e-9 || wa.norm() < 1e-9 || wb.norm() < 1e-9) {
    throw Error(ErrorCode::kDegenerateRays, "coincident world points");
  }
  const double world_angle = std::acos(std::clamp(wa.dot(wb) / (wa.norm() * wb.norm()), -1.0, 1.0));
  if (world_angle <= 1e-4 || world_angle >= kPi - 1e-4) {
    throw Error(ErrorCode::kDegenerateRays, "world rays (anti)parallel");
  }
  const Vec2 p(0.5 * image.width, 0.5 * image.height);
  const Vec2 ua = a.image - p, ub = b.image - p;
  if (ua.norm() < 1e-12 && ub.norm() < 1e-12) {
    throw Error(ErrorCode::kDegenerateRays, "both image points at the principal point");
  }
  const double target = std::cos(world_angle);
  auto mismatch = [&](double f) { return image_ray_cosine(ua, ub, f) - target; };

  // Bracket on a log grid, then bisect.
  constexpr int kGrid = 400;
  const double lo = std::log(settings.min_focal_px), hi = std::log(settings.max_focal_px);
  double f_prev = settings.min_focal_px;
  double g_prev = mismatch(f_prev);
  for (int i = 1; i <= kGrid; ++i) {
    const double f = std::exp(lo + (hi - lo) * i / kGrid);
    const double g = mismatch(f);
    if (g_prev == 0.0) return f_prev;
    if ((g_prev < 0.0) != (g < 0.0)) {
      double left = f_prev, right = f, g_left = g_prev;
      for (int it = 0; it < 200 && right - left > 1e-12 * right; ++it) {
        const double mid = 0.5 * (left + right);
        const double gm = mismatch(mid);
        if ((gm < 0.0) == (g_left < 0.0)) {
          left = mid;
          g_left = gm;
        } else {
          right = mid;
        }
      }
      return 0.5 * (left + right);
    }
    f_prev = f;
    g_prev = g;
  }
  throw Error(ErrorCode::kNoRoot, "no focal length in range matches the subtended angle");
}

PanTilt init_pan_tilt(std::span<const Correspondence2D3D> correspondences, const Vec3& focal_point) {
  if (correspondences.empty()) throw Error(ErrorCode::kTooFewCorrespondences, "no correspondences");
  Vec3 barycenter = Vec3::Zero();
  for (const auto& c : correspondences) barycenter += c.world;
  barycenter /= static_cast<double>(correspondences.size());
  const Vec3 d = barycenter - focal_point;
  if (d.norm() < 1e-9) throw Error(ErrorCode::kBarycenterAtCamera, "barycenter coincides with the focal point");
  const Vec3 axis = d.normalized();
  // r3 = (sin(pan) sin(tilt), -cos(pan) sin(tilt), cos(tilt))
  PanTilt out;
  out.tilt = std::acos(std::clamp(axis.z(), -1.0, 1.0));
  out.pan = std::hypot(axis.x(), axis.y()) > 1e-12 ? std::atan2(axis.x(), -axis.y()) : 0.0;
  return out;
}

CameraState refine_pan_tilt(std::span<const Correspondence2D3D> correspondences, const CameraState& cam,
                            const ReinitSettings& settings) {
  CameraState out = cam;
  for (int k = 0; k < settings.pan_tilt_iterations; ++k) {
    const CameraProjector projector(out);
    double dpan = 0.0, dtilt = 0.0;
    int used = 0;
    for (const auto& c : correspondences) {
      const auto px = projector.project(c.world);
      if (!px) continue;
      // A positive pan moves projections toward -x; a positive tilt toward +y.
      dpan -= 0.5 * std::atan2(c.image.x() - px->x(), out.focal);
      dtilt += 0.5 * std::atan2(c.image.y() - px->y(), out.focal);
      ++used;
    }
    if (used == 0) break;
    if (!settings.literal_sum) {
      dpan *= 2.0 / used;
      dtilt *= 2.0 / used;
    }
    out.pan += dpan;
    out.tilt = std::clamp(out.tilt + dtilt, 1e-3, kPi - 1e-3);
    if (std::abs(dpan) + std::abs(dtilt) < settings.pan_tilt_tolerance) break;
  }
  return out;
}

ReinitResult reinitialize(std::span<const Correspondence2D3D> keypoints, const TripodRig& rig,
                          const MarkingPoints& markings, const FieldTemplate& field, const ImageSize& image,
                          const SolverSettings& solver, const SolveToggles& toggles, const ReinitSettings& settings) {
  const int n = static_cast<int>(keypoints.size());
  if (n < 2) throw Error(ErrorCode::kTooFewCorrespondences, "reinitialization needs at least two keypoints");

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  if (static_cast<int>(pairs.size()) > settings.max_hypotheses) {
    std::mt19937_64 rng(settings.seed);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(settings.max_hypotheses);
  }

  Hypothesis best;
  for (int h = 0; h < static_cast<int>(pairs.size()); ++h) {
    const std::array<Correspondence2D3D, 2> sample = {keypoints[pairs[h].first], keypoints[pairs[h].second]};
    CameraState cam;
    cam.image = image;
    cam.position = rig.center;
    cam.roll = 0.0;
    cam.k1 = 0.0;
    try {
      cam.focal = estimate_focal_two_points(sample[0], sample[1], rig.center, image, settings);
      const PanTilt pt = init_pan_tilt(sample, rig.center);
      cam.pan = pt.pan;
      cam.tilt = pt.tilt;
    } catch (const Error&) {
      continue;
    }
    cam = refine_pan_tilt(sample, cam, settings);
    Hypothesis candidate = score_hypothesis(cam, keypoints, settings.ransac_threshold_px, h);
    if (best.index < 0 || better(candidate, best)) best = std::move(candidate);
    if (best.inliers.size() >= settings.early_exit_inlier_ratio * n) break;
  }
  if (best.index < 0 || best.inliers.size() < 2) throw Error(ErrorCode::kNoConsensus, "no two-point hypothesis agrees");

  ReinitResult result;
  result.hypothesis = best.camera;
  result.camera = best.camera;
  result.inliers = best.inliers;
  result.score = static_cast<int>(best.inliers.size());

  SolverInput input{markings, {}};
  SolveToggles refine = toggles;
  refine.use_flow = false;
  try {
    const SolveResult solved = solve(best.camera, input, field, rig, solver, refine);
    const SolveToggles marking_only{false, false, true};
    const double before = total_cost(best.camera, input, field, rig, solver, marking_only);
    const double after = total_cost(solved.camera, input, field, rig, solver, marking_only);
    if (after <= before) {
      result.camera = solved.camera;
      result.refined = true;
    }
  } catch (const Error&) {
    // Too few markings to refine: keep the keypoint hypothesis.
  }
  return result;
}

}  // namespace pitchcam
