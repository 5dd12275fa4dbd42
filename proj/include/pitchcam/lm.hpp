#pragma once

#include <Eigen/Core>
#include <vector>

namespace pitchcam {

struct LmSettings {
  int max_iterations = 100;
  double initial_damping = 1e-3;
  double damping_up = 10.0;
  double damping_down = 0.1;
  double max_damping = 1e12;
  double step_tolerance = 1e-12;
  double cost_tolerance = 1e-14;
};

/// One linearization of a (possibly robustified) least-squares objective.
/// `weights` are the IRLS weights at the current residuals; the gradient of
/// the objective is J^T W r.
struct Linearization {
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd weights;
  double cost = 0.0;
};

class LeastSquaresProblem {
 public:
  virtual ~LeastSquaresProblem() = default;

  virtual int num_parameters() const = 0;
  virtual double cost(const Eigen::VectorXd& x) const = 0;
  virtual void linearize(const Eigen::VectorXd& x, Linearization& out) const = 0;
  /// Maps a trial point back into the admissible domain (box clamps).
  virtual void clamp(Eigen::VectorXd& /*x*/) const {}
};

enum class LmTermination { kStepTolerance, kCostTolerance, kZeroCost, kMaxIterations, kNoProgress };

struct LmResult {
  Eigen::VectorXd x;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  LmTermination termination = LmTermination::kMaxIterations;
  /// Cost after every accepted step, starting with the initial cost.
  std::vector<double> accepted_costs;
};

/// Levenberg-Marquardt with Marquardt (diagonal) damping on the IRLS normal
/// equations. Only steps that lower cost() are accepted, so the returned
/// point never costs more than the starting one. Throws Diverged when the
/// initial cost is not finite and RankDeficient when the damped normal
/// equations cannot be solved even at max_damping.
LmResult levenberg_marquardt(const LeastSquaresProblem& problem, Eigen::VectorXd x0,
                             const LmSettings& settings = {});

}  // namespace pitchcam
