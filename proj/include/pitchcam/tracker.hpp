#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "pitchcam/field.hpp"
#include "pitchcam/observe.hpp"
#include "pitchcam/optimize.hpp"
#include "pitchcam/reinit.hpp"
#include "pitchcam/tripod.hpp"

namespace pitchcam {

enum class TrackStatus { kUninitialized, kTracking, kReinitializing, kLost };

std::string_view to_string(TrackStatus status);
std::optional<TrackStatus> status_from_string(std::string_view name);

struct TrackerSettings {
  double flow_gate = 0.5;
  double reinit_threshold = 0.5;
  double lost_threshold = 0.2;
  int lost_after_frames = 3;
  double inlier_threshold_px = 10.0;  // marking residuals counted in the report MRE
  double stroke_px = 0.0;             // 0: default_stroke_px of the image
  double bandwidth_px = 0.0;          // 0: default_bandwidth of the image
  double box_margin_px = kPlayerBoxMarginPx;
  MeanShiftSettings mean_shift;
  SolverSettings solver;
  SolveToggles toggles;
  ReinitSettings reinit;
};

/// Everything the detectors produced for one frame.
struct FrameInput {
  int frame_index = 0;
  SegmentationInput segmentation;
  std::vector<FlowMatch> flow;
  std::vector<Box> boxes;
  std::vector<Correspondence2D3D> keypoints;
};

struct TrackReport {
  int frame_index = 0;
  std::optional<CameraState> camera;
  std::optional<double> confidence;
  TrackStatus status = TrackStatus::kLost;
  double cost = 0.0;
  double mre = 0.0;
  bool reinit_used = false;
};

struct TrackerState {
  std::optional<CameraState> prev_camera;
  std::optional<double> prev_confidence;
  TripodRig rig;
  TrackStatus status = TrackStatus::kUninitialized;
  int frames_since_reinit = 0;
  int consecutive_low_score = 0;
  std::optional<int> last_frame;
};

/// Jaccard index between the union of all segmentation classes and the
/// rendered template. Throws InvalidArgument when image sizes differ.
double confidence_score(const CameraState& cam, const SegmentationInput& seg, const FieldTemplate& field,
                        double stroke_px = 0.0);

/// Sequential per-frame tracker. One instance per sequence.
class Tracker {
 public:
  Tracker(const FieldTemplate& field, const TripodRig& rig, const TrackerSettings& settings = {});

  /// Throws OutOfOrderFrame unless frame indices strictly increase.
  TrackReport step(const FrameInput& frame);

  const TrackerState& state() const { return state_; }
  const TrackerSettings& settings() const { return settings_; }

 private:
  struct Candidate {
    CameraState camera;
    double confidence = 0.0;
    double cost = 0.0;
    double mre = 0.0;
  };

  std::optional<Candidate> try_reinit(const FrameInput& frame, const MarkingPoints& markings) const;
  double score(const CameraState& cam, const SegmentationInput& seg) const;
  double inlier_mre(const CameraState& cam, const MarkingPoints& markings) const;

  const FieldTemplate& field_;
  TrackerSettings settings_;
  TrackerState state_;
};

}  // namespace pitchcam
