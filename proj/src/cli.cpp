#include "pitchcam/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "pitchcam/error.hpp"

namespace pitchcam {
namespace fs = std::filesystem;

std::vector<TrackReport> track_sequence(std::span<const FrameInput> frames, const FieldTemplate& field,
                                        const TripodRig& rig, const TrackerSettings& settings) {
  Tracker tracker(field, rig, settings);
  std::vector<TrackReport> reports;
  reports.reserve(frames.size());
  for (const FrameInput& f : frames) reports.push_back(tracker.step(f));
  return reports;
}

std::vector<TrackReport> reinit_sequence(std::span<const FrameInput> frames, const FieldTemplate& field,
                                         const TripodRig& rig, const TrackerSettings& settings) {
  std::vector<TrackReport> reports;
  for (const FrameInput& f : frames) {
    // A fresh tracker always takes the reinitialization branch.
    Tracker tracker(field, rig, settings);
    reports.push_back(tracker.step(f));
  }
  return reports;
}

TrackSummary summarize(std::span<const TrackReport> reports) {
  TrackSummary s;
  s.frames = static_cast<int>(reports.size());
  double conf = 0.0;
  for (const TrackReport& r : reports) {
    if (r.camera) {
      ++s.frames_with_camera;
      conf += r.confidence.value_or(0.0);
    }
    s.reinits += r.reinit_used ? 1 : 0;
    s.lost += r.status == TrackStatus::kLost ? 1 : 0;
  }
  if (s.frames > 0) s.completeness_percent = 100.0 * s.frames_with_camera / s.frames;
  if (s.frames_with_camera > 0) s.mean_confidence = conf / s.frames_with_camera;
  return s;
}

std::vector<FrameScore> score_reports(std::span<const TrackReport> reports, std::span<const AnnotatedFrame> annotations,
                                      const FieldTemplate& field, std::span<const double> taus) {
  std::map<int, const TrackReport*> by_frame;
  for (const TrackReport& r : reports) by_frame[r.frame_index] = &r;
  std::vector<FrameScore> scores;
  for (const AnnotatedFrame& a : annotations) {
    std::optional<CameraState> cam;
    if (const auto it = by_frame.find(a.frame_index); it != by_frame.end()) cam = it->second->camera;
    scores.push_back(score_frame(cam, a.annotation, field, taus, a.frame_index));
  }
  return scores;
}

std::string format_summary_table(const EvalSummary& s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  for (double t : s.taus) os << std::setw(10) << ("JaC_" + std::to_string(static_cast<int>(std::lround(t))));
  os << std::setw(10) << "MRE" << std::setw(10) << "MedRE" << std::setw(10) << "CR" << '\n';
  for (double j : s.jac_percent) os << std::setw(10) << j;
  os << std::setw(10) << s.mre << std::setw(10) << s.medre << std::setw(10) << s.completeness_percent << '\n';
  return os.str();
}

namespace {

struct GlobalOptions {
  std::string config_path;
  bool print_config = false;
  bool no_tripod = false;
  bool no_flow = false;
  bool no_distortion = false;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

RunConfig load_config(const GlobalOptions& g) {
  RunConfig c = g.config_path.empty() ? RunConfig{} : config_from_json(read_json_file(g.config_path));
  if (g.no_tripod) c.tracker.toggles.use_tripod = false;
  if (g.no_flow) c.tracker.toggles.use_flow = false;
  if (g.no_distortion) c.tracker.toggles.use_k1 = false;
  if (g.seed) c.tracker.reinit.seed = *g.seed;
  return c;
}

std::vector<FrameInput> load_detections(const std::string& path, const RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  auto frames = read_detections(in, c.field, c.aliases);
  std::stable_sort(frames.begin(), frames.end(),
                   [](const FrameInput& a, const FrameInput& b) { return a.frame_index < b.frame_index; });
  return frames;
}

std::vector<TrackReport> load_reports(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return read_reports(in);
}

std::string reports_text(const std::vector<TrackReport>& reports) {
  std::ostringstream os;
  write_reports(os, reports);
  return os.str();
}

TripodRig resolve_rig(const std::string& rig_path, const RunConfig& c) {
  const std::string path = rig_path.empty() ? c.paths.rig : rig_path;
  return path.empty() ? c.default_rig() : rig_from_json(read_json_file(path));
}

void print_track_summary(std::ostream& out, const std::string& label, const TrackSummary& s) {
  out << std::fixed << std::setprecision(2);
  if (!label.empty()) out << label << ": ";
  out << "frames " << s.frames << ", CR " << s.completeness_percent << "%, mean s " << std::setprecision(3)
      << s.mean_confidence << ", reinitializations " << s.reinits << ", lost " << s.lost << '\n';
}

int cmd_track(const GlobalOptions& g, const std::vector<std::string>& inputs, std::string output,
              const std::string& rig_path, bool reinit_only, std::ostream& out, std::ostream& err) {
  const RunConfig c = load_config(g);
  const FieldTemplate field = build_template(c.field);
  const TripodRig rig = resolve_rig(rig_path, c);
  if (output.empty()) output = c.paths.output;
  if (output.empty()) throw Error(ErrorCode::kInvalidArgument, "no output path");

  std::vector<std::string> files = inputs;
  if (files.empty() && !c.paths.detections.empty()) files.push_back(c.paths.detections);
  if (files.empty()) throw Error(ErrorCode::kInvalidArgument, "no detections file");

  const bool many = files.size() > 1;
  if (many) fs::create_directories(output);

  std::vector<std::vector<TrackReport>> results(files.size());
  std::vector<std::string> errors(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        const auto frames = load_detections(files[i], c);
        if (frames.empty()) {
          errors[i] = files[i] + ": no frames";
          continue;
        }
        results[i] = reinit_only ? reinit_sequence(frames, field, rig, c.tracker)
                                 : track_sequence(frames, field, rig, c.tracker);
      } catch (const std::exception& e) {
        errors[i] = files[i] + ": " + e.what();
      }
    }
  };
  const int jobs = std::clamp(g.jobs, 1, static_cast<int>(files.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool any_camera = false;
  bool failed = false;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!errors[i].empty()) {
      err << errors[i] << '\n';
      failed = true;
      continue;
    }
    const std::string dest =
        many ? (fs::path(output) / (fs::path(files[i]).stem().string() + ".reports.jsonl")).string() : output;
    write_text_file(dest, reports_text(results[i]));
    const TrackSummary s = summarize(results[i]);
    print_track_summary(out, many ? files[i] : "", s);
    any_camera = any_camera || s.frames_with_camera > 0;
  }
  if (failed) return 2;
  return any_camera ? 0 : 1;
}

int cmd_eval(const GlobalOptions& g, const std::string& predictions, const std::string& annotations_path,
             const std::vector<double>& taus, const std::string& scores_path, const std::string& summary_path,
             std::ostream& out) {
  const RunConfig c = load_config(g);
  const FieldTemplate field = build_template(c.field);
  const auto reports = load_reports(predictions);
  std::ifstream in(annotations_path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + annotations_path);
  const auto annotations = read_annotations(in, c.aliases);
  if (annotations.empty()) throw Error(ErrorCode::kParse, annotations_path + ": no frames");

  const auto scores = score_reports(reports, annotations, field, taus);
  const EvalSummary summary = aggregate(scores, static_cast<int>(annotations.size()));
  if (!scores_path.empty()) {
    std::ostringstream os;
    for (const auto& s : scores) os << score_to_json(s).dump() << '\n';
    write_text_file(scores_path, os.str());
  }
  if (!summary_path.empty()) write_text_file(summary_path, summary_to_json(summary).dump(2) + "\n");
  out << format_summary_table(summary);
  return 0;
}

int cmd_simulate(const GlobalOptions& g, const std::string& spec_path, const std::string& out_dir, std::ostream& out) {
  TrajectorySpec spec = spec_path.empty() ? TrajectorySpec{} : trajectory_from_json(read_json_file(spec_path));
  if (g.seed) spec.seed = *g.seed;
  const auto frames = generate(spec);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  std::ostringstream det, ann, truth;
  for (const SyntheticFrame& f : frames) {
    det << detection_to_json(to_frame_input(f)).dump() << '\n';
    ann << annotation_to_json(AnnotatedFrame{f.frame_index, spec.image, f.annotation}).dump() << '\n';
    TrackReport r;
    r.frame_index = f.frame_index;
    r.camera = f.truth;
    r.confidence = 1.0;
    r.status = TrackStatus::kTracking;
    truth << report_to_json(r).dump() << '\n';
  }
  write_text_file((dir / "detections.jsonl").string(), det.str());
  write_text_file((dir / "annotations.jsonl").string(), ann.str());
  write_text_file((dir / "truth.jsonl").string(), truth.str());
  write_text_file((dir / "rig.json").string(), rig_to_json(spec.rig).dump(2) + "\n");
  write_text_file((dir / "spec.json").string(), trajectory_to_json(spec).dump(2) + "\n");
  out << "wrote " << frames.size() << " frames to " << out_dir << '\n';
  return 0;
}

int cmd_fit_rig(const std::string& predictions, const std::string& output, std::ostream& out) {
  const auto reports = load_reports(predictions);
  std::vector<CameraState> cams;
  for (const auto& r : reports) {
    if (r.camera) cams.push_back(*r.camera);
  }
  const TripodRig rig = fit_rig(cams);
  const std::string text = rig_to_json(rig).dump(2) + "\n";
  if (output.empty()) {
    out << text;
  } else {
    write_text_file(output, text);
    out << text;
  }
  return 0;
}

int cmd_plot_data(const std::string& reports_path, const std::string& out_dir, std::ostream& out) {
  const auto reports = load_reports(reports_path);
  if (reports.empty()) throw Error(ErrorCode::kParse, reports_path + ": no frames");
  fs::create_directories(out_dir);
  std::map<std::string, std::ostringstream> series;
  const char* names[] = {"pan", "tilt", "roll", "focal", "k1", "position", "confidence"};
  for (const char* n : names) {
    series[n] << std::setprecision(17);
  }
  series["pan"] << "# frame pan_deg\n";
  series["tilt"] << "# frame tilt_deg\n";
  series["roll"] << "# frame roll_deg\n";
  series["focal"] << "# frame f_px\n";
  series["k1"] << "# frame k1\n";
  series["position"] << "# frame x_m y_m z_m\n";
  series["confidence"] << "# frame s\n";
  for (const auto& r : reports) {
    const int f = r.frame_index;
    if (r.camera) {
      const CameraState& c = *r.camera;
      series["pan"] << f << ' ' << rad2deg(c.pan) << '\n';
      series["tilt"] << f << ' ' << rad2deg(c.tilt) << '\n';
      series["roll"] << f << ' ' << rad2deg(c.roll) << '\n';
      series["focal"] << f << ' ' << c.focal << '\n';
      series["k1"] << f << ' ' << c.k1 << '\n';
      series["position"] << f << ' ' << c.position.x() << ' ' << c.position.y() << ' ' << c.position.z() << '\n';
    } else {
      for (const char* n : {"pan", "tilt", "roll", "focal", "k1"}) series[n] << f << " nan\n";
      series["position"] << f << " nan nan nan\n";
    }
    if (r.confidence) {
      series["confidence"] << f << ' ' << *r.confidence << '\n';
    } else {
      series["confidence"] << f << " nan\n";
    }
  }
  for (auto& [name, os] : series) write_text_file((fs::path(out_dir) / (name + ".tsv")).string(), os.str());
  out << "wrote " << series.size() << " series of " << reports.size() << " rows to " << out_dir << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Broadcast soccer camera calibration and tracking"};
  app.name("pitchcam");
  app.fallthrough();
  app.require_subcommand(0, 1);

  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_flag("--print-config", g.print_config, "Print the effective configuration and exit");
  app.add_flag("--no-tripod", g.no_tripod, "Drop the tripod term");
  app.add_flag("--no-flow", g.no_flow, "Drop the optical-flow term");
  app.add_flag("--no-distortion", g.no_distortion, "Keep k1 fixed at its initial value");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for simulation and RANSAC sampling");
  app.add_option("--jobs", g.jobs, "Sequences processed in parallel")->check(CLI::PositiveNumber);

  std::vector<std::string> inputs;
  std::string output, rig_path;
  auto* track = app.add_subcommand("track", "Track camera parameters through detection sequences");
  track->add_option("detections", inputs, "Detection files (JSON Lines)");
  track->add_option("-o,--output", output, "Report file, or directory when several inputs are given");
  track->add_option("--rig", rig_path, "Rig file {T, delta}");

  auto* reinit = app.add_subcommand("reinit", "Reinitialize every frame independently");
  reinit->add_option("detections", inputs, "Detection file")->required();
  reinit->add_option("-o,--output", output, "Report file");
  reinit->add_option("--rig", rig_path, "Rig file {T, delta}");

  std::string predictions, annotations, scores_path, summary_path;
  std::vector<double> taus = {5.0, 10.0};
  auto* eval = app.add_subcommand("eval", "Score reports against annotations");
  eval->add_option("predictions", predictions, "Report file")->required();
  eval->add_option("annotations", annotations, "Annotation file")->required();
  eval->add_option("--tau", taus, "Tolerances in pixels")->delimiter(',');
  eval->add_option("-o,--scores", scores_path, "Per-frame scores output");
  eval->add_option("--summary", summary_path, "Summary JSON output");

  std::string spec_path, out_dir;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic sequence");
  simulate->add_option("spec", spec_path, "Trajectory spec JSON (defaults when omitted)");
  simulate->add_option("-o,--output", out_dir, "Output directory")->required();

  auto* fit = app.add_subcommand("fit-rig", "Fit the tripod rig to tracked cameras");
  fit->add_option("predictions", predictions, "Report file")->required();
  fit->add_option("-o,--output", output, "Rig file");

  auto* plot = app.add_subcommand("plot-data", "Export per-parameter time series");
  plot->add_option("reports", predictions, "Report file")->required();
  plot->add_option("-o,--output", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;  // usage errors share the error exit code
  }
  if (*seed_opt) g.seed = seed;

  try {
    if (g.print_config) {
      out << config_to_json(load_config(g)).dump(2) << '\n';
      return 0;
    }
    if (*track) return cmd_track(g, inputs, output, rig_path, false, out, err);
    if (*reinit) return cmd_track(g, inputs, output, rig_path, true, out, err);
    if (*eval) return cmd_eval(g, predictions, annotations, taus, scores_path, summary_path, out);
    if (*simulate) return cmd_simulate(g, spec_path, out_dir, out);
    if (*fit) return cmd_fit_rig(predictions, output, out);
    if (*plot) return cmd_plot_data(predictions, out_dir, out);
    out << app.help();
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace pitchcam
