#include "pitchcam/tracker.hpp"

#include <array>

#include "pitchcam/error.hpp"
#include "pitchcam/render.hpp"

namespace pitchcam {
namespace {

constexpr std::array<std::pair<TrackStatus, std::string_view>, 4> kStatusNames = {{
    {TrackStatus::kUninitialized, "uninitialized"},
    {TrackStatus::kTracking, "tracking"},
    {TrackStatus::kReinitializing, "reinitializing"},
    {TrackStatus::kLost, "lost"},
}};

}  // namespace

std::string_view to_string(TrackStatus status) {
  for (const auto& [s, name] : kStatusNames) {
    if (s == status) return name;
  }
  return "unknown";
}

std::optional<TrackStatus> status_from_string(std::string_view name) {
  for (const auto& [s, n] : kStatusNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

double confidence_score(const CameraState& cam, const SegmentationInput& seg, const FieldTemplate& field,
                        double stroke_px) {
  if (!(seg.image == cam.image)) throw Error(ErrorCode::kInvalidArgument, "segmentation and camera image sizes differ");
  const double stroke = stroke_px > 0.0 ? stroke_px : default_stroke_px(cam.image);
  return jaccard(segmentation_mask(seg, stroke), render_template(cam, field, stroke));
}

Tracker::Tracker(const FieldTemplate& field, const TripodRig& rig, const TrackerSettings& settings)
    : field_(field), settings_(settings) {
  state_.rig = rig;
}

double Tracker::score(const CameraState& cam, const SegmentationInput& seg) const {
  return confidence_score(cam, seg, field_, settings_.stroke_px);
}

double Tracker::inlier_mre(const CameraState& cam, const MarkingPoints& markings) const {
  const auto residuals = marking_residuals(cam, markings, field_, settings_.solver.residual_cap_px);
  double sum = 0.0;
  int count = 0;
  for (double r : residuals) {
    if (r <= settings_.inlier_threshold_px) {
      sum += r;
      ++count;
    }
  }
  return count > 0 ? sum / count : 0.0;
}

std::optional<Tracker::Candidate> Tracker::try_reinit(const FrameInput& frame, const MarkingPoints& markings) const {
  if (frame.keypoints.size() < 2) return std::nullopt;
  try {
    const ReinitResult r = reinitialize(frame.keypoints, state_.rig, markings, field_, frame.segmentation.image,
                                        settings_.solver, settings_.toggles, settings_.reinit);
    SolveToggles no_flow = settings_.toggles;
    no_flow.use_flow = false;
    Candidate c;
    c.camera = r.camera;
    c.confidence = score(r.camera, frame.segmentation);
    c.cost = total_cost(r.camera, SolverInput{markings, {}}, field_, state_.rig, settings_.solver, no_flow);
    c.mre = inlier_mre(r.camera, markings);
    return c;
  } catch (const Error&) {
    return std::nullopt;
  }
}

TrackReport Tracker::step(const FrameInput& frame) {
  if (state_.last_frame && frame.frame_index <= *state_.last_frame) {
    throw Error(ErrorCode::kOutOfOrderFrame, "frame " + std::to_string(frame.frame_index) + " after frame " +
                                                 std::to_string(*state_.last_frame));
  }
  state_.last_frame = frame.frame_index;

  TrackReport report;
  report.frame_index = frame.frame_index;
  const ImageSize& image = frame.segmentation.image;
  const double bandwidth = settings_.bandwidth_px > 0.0 ? settings_.bandwidth_px : default_bandwidth(image);
  const MarkingPoints markings = condense_markings(frame.segmentation, bandwidth, settings_.mean_shift);

  auto lose = [&]() {
    state_.prev_camera.reset();
    state_.prev_confidence.reset();
    state_.status = TrackStatus::kLost;
    report.status = TrackStatus::kLost;
    return report;
  };
  auto accept = [&](const Candidate& c, bool reinit_used) {
    report.camera = c.camera;
    report.confidence = c.confidence;
    report.cost = c.cost;
    report.mre = c.mre;
    report.reinit_used = reinit_used;
    state_.prev_camera = c.camera;
    state_.prev_confidence = c.confidence;
    state_.frames_since_reinit = reinit_used ? 0 : state_.frames_since_reinit + 1;
  };

  if (state_.status == TrackStatus::kUninitialized || state_.status == TrackStatus::kLost || !state_.prev_camera) {
    const auto c = try_reinit(frame, markings);
    if (!c) return lose();
    accept(*c, true);
    state_.consecutive_low_score = c->confidence < settings_.lost_threshold ? 1 : 0;
    state_.status = TrackStatus::kTracking;
    report.status = TrackStatus::kTracking;
    return report;
  }

  const CameraState& prev = *state_.prev_camera;
  SolverInput input;
  input.markings = markings;
  // Flow is anchored on the previous camera, so it is only trusted when that
  // camera scored well on its own frame.
  const bool flow_trusted = settings_.toggles.use_flow && state_.prev_confidence.value_or(0.0) >= settings_.flow_gate;
  if (flow_trusted) {
    const auto kept = filter_flow(frame.flow, prev, frame.boxes, field_, settings_.box_margin_px);
    input.flow = lift_flow(kept, prev);
  }
  SolveToggles toggles = settings_.toggles;
  toggles.use_flow = flow_trusted;

  std::optional<Candidate> solved;
  try {
    const SolveResult r = solve(prev, input, field_, state_.rig, settings_.solver, toggles);
    Candidate c;
    c.camera = r.camera;
    c.confidence = score(r.camera, frame.segmentation);
    c.cost = r.final_cost;
    c.mre = inlier_mre(r.camera, markings);
    solved = c;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientResiduals && e.code() != ErrorCode::kDiverged &&
        e.code() != ErrorCode::kRankDeficient) {
      throw;
    }
  }

  std::optional<Candidate> chosen = solved;
  bool reinit_used = false;
  if (!solved || solved->confidence < settings_.reinit_threshold) {
    const auto re = try_reinit(frame, markings);
    if (re && (!solved || re->confidence > solved->confidence)) {
      chosen = re;
      reinit_used = true;
    }
  }
  if (!chosen) return lose();

  state_.consecutive_low_score = chosen->confidence < settings_.lost_threshold ? state_.consecutive_low_score + 1 : 0;
  if (state_.consecutive_low_score >= settings_.lost_after_frames) return lose();

  accept(*chosen, reinit_used);
  state_.status = chosen->confidence >= settings_.reinit_threshold ? TrackStatus::kTracking : TrackStatus::kReinitializing;
  report.status = state_.status;
  return report;
}

}  // namespace pitchcam
