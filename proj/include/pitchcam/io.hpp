#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pitchcam/eval.hpp"
#include "pitchcam/sim.hpp"
#include "pitchcam/tracker.hpp"

namespace pitchcam {

using Json = nlohmann::ordered_json;

/// External class names mapped onto canonical ones before lookup.
using ClassAliases = std::map<std::string, std::string>;

/// Throws Parse for names that are neither canonical nor aliased.
ElementClass resolve_class(const std::string& name, const ClassAliases& aliases);

// All record files are JSON Lines: one object per line, blank lines skipped.
// Parse errors carry the 1-based line number.

/// {"frame", "image": [w, h], "markings": {class: {"rle": [[y, x0, len]...]} |
/// {"points": [[x, y]...]}}, "flow": [[x0, y0, x1, y1]...],
/// "boxes": [[xmin, ymin, xmax, ymax]...], "keypoints": [{"name", "xy"}...]}.
/// Keypoint world positions are looked up by name in the template catalog
/// unless the record carries "world".
Json detection_to_json(const FrameInput& frame);
FrameInput detection_from_json(const Json& j, const FieldDimensions& dims, const ClassAliases& aliases = {});
std::vector<FrameInput> read_detections(std::istream& in, const FieldDimensions& dims,
                                        const ClassAliases& aliases = {});
void write_detections(std::ostream& out, const std::vector<FrameInput>& frames);

/// Camera as {pan_deg, tilt_deg, roll_deg, position_m, f_px, k1, image}.
Json camera_to_json(const CameraState& cam);
CameraState camera_from_json(const Json& j);

/// {"frame", "status", "camera" | null, "s" | null, "cost", "mre", "reinit_used"}.
Json report_to_json(const TrackReport& report);
TrackReport report_from_json(const Json& j);
std::vector<TrackReport> read_reports(std::istream& in);
void write_reports(std::ostream& out, const std::vector<TrackReport>& reports);

struct AnnotatedFrame {
  int frame_index = 0;
  ImageSize image;
  FrameAnnotation annotation;
};

/// {"frame", "image": [w, h], "classes": {class: [[x, y]...]}}.
Json annotation_to_json(const AnnotatedFrame& frame);
AnnotatedFrame annotation_from_json(const Json& j, const ClassAliases& aliases = {});
std::vector<AnnotatedFrame> read_annotations(std::istream& in, const ClassAliases& aliases = {});
void write_annotations(std::ostream& out, const std::vector<AnnotatedFrame>& frames);

/// {"T": [x, y, z], "delta": d}.
Json rig_to_json(const TripodRig& rig);
TripodRig rig_from_json(const Json& j);

/// Trajectory spec; keys absent from the object keep their defaults,
/// unknown keys throw Parse.
Json trajectory_to_json(const TrajectorySpec& spec);
TrajectorySpec trajectory_from_json(const Json& j);

/// Per-frame scores: {"frame", "camera_present", "taus", "tp", "fp", "fn", "jac", "mre"}.
Json score_to_json(const FrameScore& score);
Json summary_to_json(const EvalSummary& summary);

/// Detector-style view of a simulated frame.
FrameInput to_frame_input(const SyntheticFrame& frame);

Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace pitchcam
