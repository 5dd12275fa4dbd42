#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pitchcam/config.hpp"
#include "pitchcam/tracker.hpp"

namespace pitchcam {

/// Runs a fresh tracker over the frames in order.
std::vector<TrackReport> track_sequence(std::span<const FrameInput> frames, const FieldTemplate& field,
                                        const TripodRig& rig, const TrackerSettings& settings);

/// Independent reinitialization of every frame (no temporal state).
std::vector<TrackReport> reinit_sequence(std::span<const FrameInput> frames, const FieldTemplate& field,
                                         const TripodRig& rig, const TrackerSettings& settings);

struct TrackSummary {
  int frames = 0;
  int frames_with_camera = 0;
  int reinits = 0;
  int lost = 0;
  double completeness_percent = 0.0;
  double mean_confidence = 0.0;  // over frames with a camera
};

TrackSummary summarize(std::span<const TrackReport> reports);

/// Scores every annotated frame against the report of the same index; frames
/// without a report or without a camera count as absent.
std::vector<FrameScore> score_reports(std::span<const TrackReport> reports, std::span<const AnnotatedFrame> annotations,
                                      const FieldTemplate& field, std::span<const double> taus);

/// Plain-text table with the columns JaC_tau..., MRE, MedRE, CR.
std::string format_summary_table(const EvalSummary& summary);

/// Command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pitchcam
