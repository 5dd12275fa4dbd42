#include "pitchcam/lm.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "pitchcam/error.hpp"

namespace pitchcam {

LmResult levenberg_marquardt(const LeastSquaresProblem& problem, Eigen::VectorXd x0, const LmSettings& settings) {
  const int n = problem.num_parameters();
  LmResult result;
  problem.clamp(x0);
  result.x = std::move(x0);

  Linearization lin;
  problem.linearize(result.x, lin);
  if (!std::isfinite(lin.cost)) throw Error(ErrorCode::kDiverged, "initial cost is not finite");
  result.initial_cost = result.final_cost = lin.cost;
  result.accepted_costs.push_back(lin.cost);
  result.iterations = 1;

  double damping = settings.initial_damping;
  bool need_linearization = false;
  while (true) {
    if (lin.cost == 0.0) {
      result.termination = LmTermination::kZeroCost;
      break;
    }
    if (result.iterations >= settings.max_iterations) {
      result.termination = LmTermination::kMaxIterations;
      break;
    }
    if (need_linearization) {
      problem.linearize(result.x, lin);
      ++result.iterations;
      need_linearization = false;
    }

    const Eigen::MatrixXd wj = lin.weights.asDiagonal() * lin.jacobian;
    const Eigen::MatrixXd hessian = lin.jacobian.transpose() * wj;
    const Eigen::VectorXd gradient = wj.transpose() * lin.residuals;
    Eigen::VectorXd diag = hessian.diagonal();
    const double diag_floor = 1e-12 * std::max(1.0, diag.maxCoeff());
    for (int i = 0; i < n; ++i) diag[i] = std::max(diag[i], diag_floor);

    bool accepted = false;
    bool solvable = false;
    while (damping <= settings.max_damping) {
      Eigen::MatrixXd damped = hessian;
      damped.diagonal() += damping * diag;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      Eigen::VectorXd step;
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) step = -ldlt.solve(gradient);
      if (step.size() != n || !step.allFinite()) {
        damping *= settings.damping_up;
        continue;
      }
      solvable = true;

      Eigen::VectorXd trial = result.x + step;
      problem.clamp(trial);
      const double trial_cost = problem.cost(trial);
      const double step_norm = (trial - result.x).norm();
      if (std::isfinite(trial_cost) && trial_cost < lin.cost) {
        const double decrease = (lin.cost - trial_cost) / lin.cost;
        result.x = std::move(trial);
        lin.cost = trial_cost;
        result.final_cost = trial_cost;
        result.accepted_costs.push_back(trial_cost);
        damping = std::max(damping * settings.damping_down, 1e-15);
        accepted = true;
        if (step_norm < settings.step_tolerance * (result.x.norm() + settings.step_tolerance)) {
          result.termination = LmTermination::kStepTolerance;
          return result;
        }
        if (decrease < settings.cost_tolerance) {
          result.termination = LmTermination::kCostTolerance;
          return result;
        }
        break;
      }
      if (step_norm < settings.step_tolerance * (result.x.norm() + settings.step_tolerance)) {
        result.termination = LmTermination::kStepTolerance;
        return result;
      }
      damping *= settings.damping_up;
    }
    if (!solvable) throw Error(ErrorCode::kRankDeficient, "normal equations singular at maximum damping");
    if (!accepted) {
      result.termination = LmTermination::kNoProgress;
      break;
    }
    need_linearization = true;
  }
  return result;
}

}  // namespace pitchcam
