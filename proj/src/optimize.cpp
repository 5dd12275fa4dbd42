#include "pitchcam/optimize.hpp"

#include <cmath>
#include <unordered_map>

#include "pitchcam/error.hpp"

namespace pitchcam {
namespace {

using Row = Eigen::Matrix<double, 1, kNumCameraParams>;

// Residuals, IRLS weights and (optionally) natural-unit Jacobian rows, in the
// order markings, flow (x then y), tripod.
struct Evaluation {
  std::vector<double> residuals;
  std::vector<double> weights;
  std::vector<Row> rows;
  double cost = 0.0;
  std::size_t marking_count = 0;
  std::size_t flow_count = 0;
  bool has_tripod = false;
};

void evaluate(const CameraState& cam, const SolverInput& input, const FieldTemplate& field, const TripodRig& rig,
              const SolverSettings& settings, const SolveToggles& toggles, bool with_jacobian, Evaluation& out) {
  out = Evaluation{};
  const double c = settings.cauchy_scale_px;
  const double cap = settings.residual_cap_px;
  const CameraProjector projector(cam);

  for (const auto& [cls, points] : input.markings) {
    if (points.empty()) continue;
    const Polyline& samples = field.loss_samples(cls);
    ProjectedPolyline projected;
    projected.closed = samples.closed;
    projected.pixels.resize(samples.points.size(), Vec2::Zero());
    projected.usable.assign(samples.points.size(), 0);
    for (std::size_t i = 0; i < samples.points.size(); ++i) {
      if (auto px = projector.project_valid(samples.points[i])) {
        projected.pixels[i] = *px;
        projected.usable[i] = 1;
      }
    }
    std::unordered_map<int, ProjectionJacobian> jacobians;
    auto sample_jacobian = [&](int idx) -> const ProjectionJacobian& {
      auto it = jacobians.find(idx);
      if (it == jacobians.end()) {
        ProjectionJacobian j;
        projector.project(samples.points[idx], &j);
        it = jacobians.emplace(idx, j).first;
      }
      return it->second;
    };

    for (const Vec2& q : points) {
      const auto closest = closest_point(projected, q);
      const double r = closest ? closest->distance : cap;
      const RobustValue rv = robustify(r, c);
      out.residuals.push_back(r);
      out.weights.push_back(rv.weight);
      out.cost += rv.cost;
      if (!with_jacobian) continue;
      Row row = Row::Zero();
      if (closest) {
        Vec2 normal;
        if (closest->distance > 1e-12) {
          normal = (q - closest->point) / closest->distance;
        } else {
          const Vec2 tangent = projected.pixels[closest->second] - projected.pixels[closest->first];
          normal = tangent.norm() > 0.0 ? Vec2(-tangent.y(), tangent.x()).normalized() : Vec2::Zero();
        }
        const ProjectionJacobian blended = (1.0 - closest->t) * sample_jacobian(closest->first) +
                                           closest->t * sample_jacobian(closest->second);
        row = -normal.transpose() * blended;
      }
      out.rows.push_back(row);
    }
  }
  out.marking_count = out.residuals.size();

  if (toggles.use_flow) {
    for (const auto& lp : input.flow) {
      ProjectionJacobian j;
      const auto px = projector.project(lp.previous_ground, with_jacobian ? &j : nullptr);
      Vec2 r = px ? Vec2(*px - lp.current) : Vec2(cap / std::sqrt(2.0), cap / std::sqrt(2.0));
      const RobustValue rv = robustify(r.norm(), c);
      out.cost += rv.cost;
      for (int k = 0; k < 2; ++k) {
        out.residuals.push_back(r[k]);
        out.weights.push_back(rv.weight);
        if (with_jacobian) out.rows.push_back(px ? Row(j.row(k)) : Row::Zero());
      }
      ++out.flow_count;
    }
  }

  // A zero weight drops the term, so omega = 0 is exactly the unconstrained problem.
  if (toggles.use_tripod && settings.omega != 0.0) {
    Row j;
    const double r = settings.omega * tripod_residual(cam, rig, with_jacobian ? &j : nullptr);
    out.residuals.push_back(r);
    out.weights.push_back(1.0);
    out.cost += 0.5 * r * r;
    if (with_jacobian) out.rows.push_back(settings.omega * j);
    out.has_tripod = true;
  }
}

// Natural parameter = scale * solver parameter.
constexpr std::array<double, kNumCameraParams> kParamScale = {1000.0, 0.1, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};

class CameraProblem final : public LeastSquaresProblem {
 public:
  CameraProblem(const CameraState& initial, const SolverInput& input, const FieldTemplate& field,
                const TripodRig& rig, const SolverSettings& settings, const SolveToggles& toggles)
      : initial_(initial), input_(input), field_(field), rig_(rig), settings_(settings), toggles_(toggles) {
    for (int p = 0; p < kNumCameraParams; ++p) {
      if (p == kK1 && !toggles.use_k1) continue;
      free_.push_back(p);
    }
  }

  int num_parameters() const override { return static_cast<int>(free_.size()); }

  Eigen::VectorXd pack(const CameraState& cam) const {
    const auto p = cam.parameters();
    Eigen::VectorXd x(free_.size());
    for (std::size_t i = 0; i < free_.size(); ++i) x[i] = p[free_[i]] / kParamScale[free_[i]];
    return x;
  }

  CameraState unpack(const Eigen::VectorXd& x) const {
    auto p = initial_.parameters();
    for (std::size_t i = 0; i < free_.size(); ++i) p[free_[i]] = x[i] * kParamScale[free_[i]];
    CameraState cam = initial_;
    cam.set_parameters(p);
    return cam;
  }

  double cost(const Eigen::VectorXd& x) const override {
    Evaluation e;
    evaluate(unpack(x), input_, field_, rig_, settings_, toggles_, false, e);
    return e.cost;
  }

  void linearize(const Eigen::VectorXd& x, Linearization& out) const override {
    Evaluation e;
    evaluate(unpack(x), input_, field_, rig_, settings_, toggles_, true, e);
    const int m = static_cast<int>(e.residuals.size());
    out.residuals = Eigen::Map<const Eigen::VectorXd>(e.residuals.data(), m);
    out.weights = Eigen::Map<const Eigen::VectorXd>(e.weights.data(), m);
    out.jacobian.resize(m, num_parameters());
    for (int r = 0; r < m; ++r) {
      for (std::size_t i = 0; i < free_.size(); ++i) out.jacobian(r, i) = e.rows[r][free_[i]] * kParamScale[free_[i]];
    }
    out.cost = e.cost;
  }

  void clamp(Eigen::VectorXd& x) const override {
    for (std::size_t i = 0; i < free_.size(); ++i) {
      switch (free_[i]) {
        case kFocal:
          x[i] = std::max(x[i], 0.01);
          break;
        case kK1: {
          const double lim = settings_.k1_limit / kParamScale[kK1];
          x[i] = std::clamp(x[i], -lim, lim);
          break;
        }
        case kTilt:
          x[i] = std::clamp(x[i], 1e-3, kPi - 1e-3);
          break;
        default:
          break;
      }
    }
  }

 private:
  CameraState initial_;
  const SolverInput& input_;
  const FieldTemplate& field_;
  const TripodRig& rig_;
  const SolverSettings& settings_;
  SolveToggles toggles_;
  std::vector<int> free_;
};

}  // namespace

RobustValue robustify(double residual, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorCode::kInvalidArgument, "Cauchy scale must be positive");
  const double u = (residual / scale) * (residual / scale);
  return {0.5 * scale * scale * std::log1p(u), 1.0 / (1.0 + u)};
}

std::vector<double> marking_residuals(const CameraState& cam, const MarkingPoints& markings,
                                      const FieldTemplate& field, double cap) {
  SolverSettings s;
  s.residual_cap_px = cap;
  Evaluation e;
  evaluate(cam, SolverInput{markings, {}}, field, TripodRig{}, s, SolveToggles{false, false, true}, false, e);
  return e.residuals;
}

std::vector<Vec2> flow_residuals(const CameraState& cam, std::span<const LiftedFlowPoint> lifted, double cap) {
  std::vector<Vec2> out;
  out.reserve(lifted.size());
  const CameraProjector projector(cam);
  for (const auto& lp : lifted) {
    const auto px = projector.project(lp.previous_ground);
    out.push_back(px ? Vec2(*px - lp.current) : Vec2(cap / std::sqrt(2.0), cap / std::sqrt(2.0)));
  }
  return out;
}

ResidualBundle assemble_residuals(const CameraState& cam, const SolverInput& input, const FieldTemplate& field,
                                  const TripodRig& rig, const SolverSettings& settings, const SolveToggles& toggles) {
  Evaluation e;
  evaluate(cam, input, field, rig, settings, toggles, false, e);
  ResidualBundle b;
  b.marking.assign(e.residuals.begin(), e.residuals.begin() + e.marking_count);
  b.marking_weights.assign(e.weights.begin(), e.weights.begin() + e.marking_count);
  for (std::size_t i = 0; i < e.flow_count; ++i) {
    const std::size_t r = e.marking_count + 2 * i;
    b.flow.emplace_back(e.residuals[r], e.residuals[r + 1]);
    b.flow_weights.push_back(e.weights[r]);
  }
  if (e.has_tripod) b.tripod = e.residuals.back();
  return b;
}

double total_cost(const CameraState& cam, const SolverInput& input, const FieldTemplate& field,
                  const TripodRig& rig, const SolverSettings& settings, const SolveToggles& toggles) {
  Evaluation e;
  evaluate(cam, input, field, rig, settings, toggles, false, e);
  return e.cost;
}

Eigen::Matrix<double, kNumCameraParams, 1> total_cost_gradient(const CameraState& cam, const SolverInput& input,
                                                               const FieldTemplate& field, const TripodRig& rig,
                                                               const SolverSettings& settings,
                                                               const SolveToggles& toggles) {
  Evaluation e;
  evaluate(cam, input, field, rig, settings, toggles, true, e);
  Eigen::Matrix<double, kNumCameraParams, 1> g = Eigen::Matrix<double, kNumCameraParams, 1>::Zero();
  for (std::size_t r = 0; r < e.residuals.size(); ++r) g += e.rows[r].transpose() * (e.weights[r] * e.residuals[r]);
  return g;
}

SolveResult solve(const CameraState& initial, const SolverInput& input, const FieldTemplate& field,
                  const TripodRig& rig, const SolverSettings& settings, const SolveToggles& toggles) {
  std::size_t observed = 0;
  for (const auto& [c, pts] : input.markings) observed += pts.size();
  if (toggles.use_flow) observed += 2 * input.flow.size();
  if (observed < 4) throw Error(ErrorCode::kInsufficientResiduals, "fewer than 4 observation residuals");

  CameraProblem problem(initial, input, field, rig, settings, toggles);
  LmSettings lm;
  lm.max_iterations = settings.max_iterations;
  lm.initial_damping = settings.initial_damping;
  lm.damping_up = settings.damping_up;
  lm.damping_down = settings.damping_down;
  lm.step_tolerance = settings.step_tolerance;
  lm.cost_tolerance = settings.cost_tolerance;
  const LmResult r = levenberg_marquardt(problem, problem.pack(initial), lm);

  SolveResult out;
  out.camera = problem.unpack(r.x);
  out.initial_cost = r.initial_cost;
  out.final_cost = r.final_cost;
  out.iterations = r.iterations;
  out.termination = r.termination;
  out.accepted_costs = r.accepted_costs;
  return out;
}

}  // namespace pitchcam
