#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pitchcam/field.hpp"

namespace pitchcam {

/// Annotated image polylines per class (pixels).
using FrameAnnotation = std::map<ElementClass, std::vector<Vec2>>;

struct FrameScore {
  int frame_index = 0;
  bool camera_present = false;
  std::vector<double> taus;
  std::vector<int> tp, fp, fn;            // per tau
  std::vector<double> jac;                // per tau, in [0, 1]
  std::vector<double> distances;          // pooled per-point reprojection distances
  std::map<ElementClass, std::vector<bool>> correct;  // annotated classes, per tau

  /// Mean of `distances`, 0 when empty.
  double mre() const;
};

/// Whether any sample of the element projects inside [0, w) x [0, h).
bool predicted_visible(const CameraState& cam, const FieldTemplate& field, ElementClass c);

/// Element-level Jaccard at each tau: a class is correct when it is predicted
/// visible and every annotated point is within tau of its projection. Throws
/// InvalidArgument for an empty annotation or an empty tau list.
FrameScore score_frame(const std::optional<CameraState>& cam, const FrameAnnotation& annotation,
                       const FieldTemplate& field, std::span<const double> taus, int frame_index = 0);

struct EvalSummary {
  std::vector<double> taus;
  std::vector<double> jac_percent;  // mean over frames with a camera
  double mre = 0.0;
  double medre = 0.0;
  double completeness_percent = 0.0;
  int frames = 0;
  int frames_with_camera = 0;
};

/// Frames without a score count as absent; `total_frames` is the CR denominator.
EvalSummary aggregate(std::span<const FrameScore> scores, int total_frames);

}  // namespace pitchcam
