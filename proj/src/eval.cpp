#include "pitchcam/eval.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "pitchcam/error.hpp"

namespace pitchcam {

double FrameScore::mre() const {
  if (distances.empty()) return 0.0;
  return std::accumulate(distances.begin(), distances.end(), 0.0) / distances.size();
}

bool predicted_visible(const CameraState& cam, const FieldTemplate& field, ElementClass c) {
  const CameraProjector projector(cam);
  for (const Vec3& x : field.loss_samples(c).points) {
    const auto px = projector.project_valid(x);
    if (px && in_image(cam.image, *px)) return true;
  }
  return false;
}

FrameScore score_frame(const std::optional<CameraState>& cam, const FrameAnnotation& annotation,
                       const FieldTemplate& field, std::span<const double> taus, int frame_index) {
  if (taus.empty()) throw Error(ErrorCode::kInvalidArgument, "no tolerance given");
  bool any = false;
  for (const auto& [c, pts] : annotation) any = any || !pts.empty();
  if (!any) throw Error(ErrorCode::kInvalidArgument, "empty annotation");

  const std::size_t nt = taus.size();
  FrameScore s;
  s.frame_index = frame_index;
  s.camera_present = cam.has_value();
  s.taus.assign(taus.begin(), taus.end());
  s.tp.assign(nt, 0);
  s.fp.assign(nt, 0);
  s.fn.assign(nt, 0);
  s.jac.assign(nt, 0.0);

  for (ElementClass c : all_element_classes()) {
    const auto it = annotation.find(c);
    const bool annotated = it != annotation.end() && !it->second.empty();
    const bool visible = cam && predicted_visible(*cam, field, c);
    if (!annotated) {
      if (visible) {
        for (std::size_t k = 0; k < nt; ++k) ++s.fp[k];
      }
      continue;
    }
    double worst = std::numeric_limits<double>::infinity();
    if (cam) {
      const ProjectedPolyline projected = project_polyline(*cam, field.loss_samples(c));
      if (projected.any_usable()) {
        worst = 0.0;
        for (const Vec2& q : it->second) {
          const auto cp = closest_point(projected, q);
          const double d = cp->distance;
          s.distances.push_back(d);
          worst = std::max(worst, d);
        }
      }
    }
    auto& flags = s.correct[c];
    for (std::size_t k = 0; k < nt; ++k) {
      const bool ok = visible && worst <= taus[k];
      flags.push_back(ok);
      ++(ok ? s.tp[k] : s.fn[k]);
    }
  }
  for (std::size_t k = 0; k < nt; ++k) {
    const int denom = s.tp[k] + s.fp[k] + s.fn[k];
    s.jac[k] = denom > 0 ? static_cast<double>(s.tp[k]) / denom : 0.0;
  }
  return s;
}

EvalSummary aggregate(std::span<const FrameScore> scores, int total_frames) {
  EvalSummary out;
  out.frames = total_frames;
  if (!scores.empty()) out.taus = scores.front().taus;
  out.jac_percent.assign(out.taus.size(), 0.0);
  std::vector<double> pooled;
  for (const FrameScore& s : scores) {
    if (!s.camera_present) continue;
    ++out.frames_with_camera;
    for (std::size_t k = 0; k < out.taus.size() && k < s.jac.size(); ++k) out.jac_percent[k] += s.jac[k];
    pooled.insert(pooled.end(), s.distances.begin(), s.distances.end());
  }
  if (out.frames_with_camera > 0) {
    for (double& j : out.jac_percent) j = 100.0 * j / out.frames_with_camera;
  }
  if (!pooled.empty()) {
    out.mre = std::accumulate(pooled.begin(), pooled.end(), 0.0) / pooled.size();
    std::sort(pooled.begin(), pooled.end());
    const std::size_t n = pooled.size();
    out.medre = n % 2 ? pooled[n / 2] : 0.5 * (pooled[n / 2 - 1] + pooled[n / 2]);
  }
  out.completeness_percent = total_frames > 0 ? 100.0 * out.frames_with_camera / total_frames : 0.0;
  return out;
}

}  // namespace pitchcam
