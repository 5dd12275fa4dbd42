#include "pitchcam/tripod.hpp"

#include <algorithm>
#include <cmath>

#include "pitchcam/error.hpp"

namespace pitchcam {
namespace {

// d(r3)/d(angle): r3 is the last row of R, so its derivative is the last row
// of dR/d(angle).
Eigen::Matrix3d axis_derivatives(const CameraState& cam) {
  const double cp = std::cos(cam.pan), sp = std::sin(cam.pan);
  const double ct = std::cos(cam.tilt), st = std::sin(cam.tilt);
  // r3 = (sin(pan) sin(tilt), -cos(pan) sin(tilt), cos(tilt)); roll does not move it.
  Eigen::Matrix3d d;
  d.col(0) = Vec3(cp * st, sp * st, 0.0);
  d.col(1) = Vec3(sp * ct, -cp * ct, -st);
  d.col(2) = Vec3::Zero();
  return d;
}

class RigProblem final : public LeastSquaresProblem {
 public:
  explicit RigProblem(std::span<const CameraState> cameras) {
    for (const auto& cam : cameras) {
      positions_.push_back(cam.position);
      axes_.push_back(cam.rotation().row(2).transpose());
    }
  }

  int num_parameters() const override { return 4; }

  double cost(const Eigen::VectorXd& x) const override {
    double c = 0.0;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      const double r = x[3] - offset_vector(i, x).norm();
      c += 0.5 * r * r;
    }
    return c;
  }

  void linearize(const Eigen::VectorXd& x, Linearization& out) const override {
    const int m = static_cast<int>(axes_.size());
    out.residuals.resize(m);
    out.jacobian.setZero(m, 4);
    out.weights.setOnes(m);
    out.cost = 0.0;
    for (int i = 0; i < m; ++i) {
      const Vec3 v = offset_vector(i, x);
      const double norm = v.norm();
      out.residuals[i] = x[3] - norm;
      if (norm > 1e-15) out.jacobian.block<1, 3>(i, 0) = v.transpose() / norm;
      out.jacobian(i, 3) = 1.0;
      out.cost += 0.5 * out.residuals[i] * out.residuals[i];
    }
  }

 private:
  // O* - T = (I - r3 r3^T)(C - T)
  Vec3 offset_vector(std::size_t i, const Eigen::VectorXd& x) const {
    const Vec3 w = positions_[i] - x.head<3>();
    return w - axes_[i].dot(w) * axes_[i];
  }

  std::vector<Vec3> positions_;
  std::vector<Vec3> axes_;
};

}  // namespace

TripodDerived optical_axis_point(const CameraState& cam, const TripodRig& rig) {
  const Vec3 r3 = cam.rotation().row(2).transpose();
  TripodDerived out;
  out.axis_point = cam.position + (rig.center - cam.position).dot(r3) / r3.squaredNorm() * r3;
  out.lambda = (cam.position - out.axis_point).dot(r3);
  return out;
}

double tripod_residual(const CameraState& cam, const TripodRig& rig,
                       Eigen::Matrix<double, 1, kNumCameraParams>* jacobian) {
  const Vec3 r3 = cam.rotation().row(2).transpose();
  const Vec3 w = cam.position - rig.center;
  const double along = r3.dot(w);
  const Vec3 v = w - along * r3;
  const double norm = v.norm();
  if (jacobian) {
    jacobian->setZero();
    if (norm > 1e-15) {
      const Eigen::RowVector3d unit = v.transpose() / norm;
      const Eigen::Matrix3d dv_dr3 = -along * Eigen::Matrix3d::Identity() - r3 * w.transpose();
      const Eigen::Matrix3d dr3 = axis_derivatives(cam);
      jacobian->block<1, 3>(0, kPan) = -unit * dv_dr3 * dr3;
      jacobian->block<1, 3>(0, kCx) = -unit * (Eigen::Matrix3d::Identity() - r3 * r3.transpose());
    }
  }
  return rig.offset - norm;
}

CameraState camera_on_rig(const TripodRig& rig, double pan, double tilt, double roll, double lambda,
                          double focal, double k1, const ImageSize& image) {
  CameraState cam;
  cam.pan = pan;
  cam.tilt = tilt;
  cam.roll = roll;
  cam.focal = focal;
  cam.k1 = k1;
  cam.image = image;
  const Mat3 r = rotation_from_angles(pan, tilt, roll);
  cam.position = rig.center - rig.offset * r.row(1).transpose() + lambda * r.row(2).transpose();
  return cam;
}

TripodRig fit_rig(std::span<const CameraState> cameras, const FitRigSettings& settings) {
  if (static_cast<int>(cameras.size()) < settings.min_cameras) {
    throw Error(ErrorCode::kInsufficientDiversity, "too few cameras to fit the tripod");
  }
  auto span_of = [&](auto member) {
    const auto [lo, hi] = std::minmax_element(cameras.begin(), cameras.end(),
                                              [&](const auto& a, const auto& b) { return a.*member < b.*member; });
    return (*hi).*member - (*lo).*member;
  };
  if (span_of(&CameraState::pan) < settings.min_pan_span || span_of(&CameraState::tilt) < settings.min_tilt_span) {
    throw Error(ErrorCode::kInsufficientDiversity, "pan/tilt sweep too small, rotation center unobservable");
  }

  Vec3 mean = Vec3::Zero();
  for (const auto& cam : cameras) mean += cam.position;
  mean /= static_cast<double>(cameras.size());

  // The scalar residual has a mirrored basin near T - 2 delta r2 when tilt
  // varies little, so LM also starts from the linear solution of
  // C = T - delta r2 + lambda r3 with lambda projected out, and the lower
  // cost wins.
  Eigen::Matrix4d normal = Eigen::Matrix4d::Zero();
  Eigen::Vector4d rhs = Eigen::Vector4d::Zero();
  for (const auto& cam : cameras) {
    const Mat3 r = cam.rotation();
    const Vec3 r3 = r.row(2).transpose();
    Eigen::Matrix<double, 3, 4> a;
    a.leftCols<3>() = Mat3::Identity() - r3 * r3.transpose();
    a.col(3) = -r.row(1).transpose();
    normal += a.transpose() * a;
    rhs += a.transpose() * (a.leftCols<3>() * cam.position);
  }
  const Eigen::Vector4d linear = normal.ldlt().solve(rhs);

  Eigen::VectorXd from_mean(4), from_linear(4);
  from_mean << mean, settings.initial_offset;
  from_linear << linear.head<3>(), std::max(0.0, linear[3]);
  RigProblem problem(cameras);
  LmResult best = levenberg_marquardt(problem, from_mean, settings.lm);
  if (linear.allFinite()) {
    LmResult other = levenberg_marquardt(problem, from_linear, settings.lm);
    if (other.final_cost < best.final_cost) best = std::move(other);
  }
  return TripodRig{best.x.head<3>(), std::max(0.0, best.x[3])};
}

}  // namespace pitchcam
