#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pitchcam/field.hpp"
#include "pitchcam/lm.hpp"
#include "pitchcam/observe.hpp"
#include "pitchcam/tripod.hpp"

namespace pitchcam {

struct SolverSettings {
  double omega = 100.0;             // tripod weight, pixels per meter
  double cauchy_scale_px = 3.0;
  double residual_cap_px = 50.0;    // stands in for geometry that does not project
  double k1_limit = 0.3;
  int max_iterations = 50;
  double initial_damping = 1e-3;
  double damping_up = 10.0;
  double damping_down = 0.1;
  double step_tolerance = 1e-10;
  double cost_tolerance = 1e-12;
};

struct SolveToggles {
  bool use_flow = true;
  bool use_tripod = true;
  bool use_k1 = true;
};

using MarkingPoints = std::map<ElementClass, std::vector<Vec2>>;

/// What the per-frame solver consumes: condensed marking points and flow
/// matches already lifted to the ground with the previous camera.
struct SolverInput {
  MarkingPoints markings;
  std::vector<LiftedFlowPoint> flow;
};

struct RobustValue {
  double cost = 0.0;
  double weight = 1.0;
};

/// Cauchy kernel: cost = c^2/2 * log(1 + (r/c)^2), IRLS weight = 1 / (1 + (r/c)^2).
RobustValue robustify(double residual, double scale);

/// Distance of every marking point to its projected template element, in the
/// order of `markings` (class, then point). Classes that do not project at all
/// yield `cap` for each point.
std::vector<double> marking_residuals(const CameraState& cam, const MarkingPoints& markings,
                                      const FieldTemplate& field, double cap = SolverSettings{}.residual_cap_px);

/// pi(X_prev) - x_curr per lifted match; matches projecting behind the camera
/// yield a vector of norm `cap`.
std::vector<Vec2> flow_residuals(const CameraState& cam, std::span<const LiftedFlowPoint> lifted,
                                 double cap = SolverSettings{}.residual_cap_px);

/// Flattened residuals with their IRLS weights; the tripod entry is already
/// scaled by omega.
struct ResidualBundle {
  std::vector<double> marking;
  std::vector<Vec2> flow;
  std::optional<double> tripod;
  std::vector<double> marking_weights;
  std::vector<double> flow_weights;

  std::size_t size() const { return marking.size() + 2 * flow.size() + (tripod ? 1 : 0); }
};

ResidualBundle assemble_residuals(const CameraState& cam, const SolverInput& input, const FieldTemplate& field,
                                  const TripodRig& rig, const SolverSettings& settings, const SolveToggles& toggles);

/// L = sum rho(marking) + sum rho(|flow|) + (omega * L_T)^2 / 2.
double total_cost(const CameraState& cam, const SolverInput& input, const FieldTemplate& field,
                  const TripodRig& rig, const SolverSettings& settings, const SolveToggles& toggles);

/// Analytic gradient of total_cost with respect to the eight parameters
/// (natural units, CameraParam order).
Eigen::Matrix<double, kNumCameraParams, 1> total_cost_gradient(const CameraState& cam, const SolverInput& input,
                                                               const FieldTemplate& field, const TripodRig& rig,
                                                               const SolverSettings& settings,
                                                               const SolveToggles& toggles);

struct SolveResult {
  CameraState camera;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  LmTermination termination = LmTermination::kMaxIterations;
  std::vector<double> accepted_costs;
};

/// Robust LM over (f, k1, pan, tilt, roll, C). Parameters are scaled to
/// f / 1000 and k1 / 0.1 inside the solver; k1 is clamped to +-k1_limit and
/// frozen when use_k1 is off. Throws InsufficientResiduals when markings and
/// flow give fewer than 4 scalar residuals, Diverged or RankDeficient.
SolveResult solve(const CameraState& initial, const SolverInput& input, const FieldTemplate& field,
                  const TripodRig& rig, const SolverSettings& settings, const SolveToggles& toggles);

}  // namespace pitchcam
