#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pitchcam/cli.hpp"
#include "pitchcam/error.hpp"
#include "pitchcam/io.hpp"
#include "pitchcam/sim.hpp"
#include "pitchcam/tracker.hpp"

namespace py = pybind11;
using namespace pitchcam;

namespace {

RunConfig config_or_default(const std::optional<std::string>& config_json) {
  return config_json ? config_from_json(Json::parse(*config_json)) : RunConfig{};
}

std::string simulate_jsonl(const std::optional<std::string>& spec_json, std::optional<std::uint64_t> seed,
                           const std::string& what) {
  TrajectorySpec spec = spec_json ? trajectory_from_json(Json::parse(*spec_json)) : TrajectorySpec{};
  if (seed) spec.seed = *seed;
  std::ostringstream os;
  for (const SyntheticFrame& f : generate(spec)) {
    if (what == "detections") {
      os << detection_to_json(to_frame_input(f)).dump() << '\n';
    } else if (what == "annotations") {
      os << annotation_to_json(AnnotatedFrame{f.frame_index, spec.image, f.annotation}).dump() << '\n';
    } else {
      TrackReport r;
      r.frame_index = f.frame_index;
      r.camera = f.truth;
      r.confidence = 1.0;
      r.status = TrackStatus::kTracking;
      os << report_to_json(r).dump() << '\n';
    }
  }
  return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Broadcast soccer camera calibration and tracking";

  static py::exception<Error> error_type(m, "PitchcamError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error_type, e.what());
    }
  });

  py::class_<ImageSize>(m, "ImageSize")
      .def(py::init<>())
      .def(py::init([](int w, int h) { return ImageSize{w, h}; }), py::arg("width"), py::arg("height"))
      .def_readwrite("width", &ImageSize::width)
      .def_readwrite("height", &ImageSize::height);

  py::class_<CameraState>(m, "CameraState")
      .def(py::init<>())
      .def_readwrite("focal", &CameraState::focal)
      .def_readwrite("k1", &CameraState::k1)
      .def_readwrite("pan", &CameraState::pan)
      .def_readwrite("tilt", &CameraState::tilt)
      .def_readwrite("roll", &CameraState::roll)
      .def_readwrite("position", &CameraState::position)
      .def_readwrite("image", &CameraState::image)
      .def("rotation", &CameraState::rotation)
      .def("principal_point", &CameraState::principal_point)
      .def("__repr__", [](const CameraState& c) { return camera_to_json(c).dump(); });

  py::class_<TripodRig>(m, "TripodRig")
      .def(py::init<>())
      .def(py::init([](const Vec3& t, double delta) { return TripodRig{t, delta}; }), py::arg("center"),
           py::arg("offset"))
      .def_readwrite("center", &TripodRig::center)
      .def_readwrite("offset", &TripodRig::offset);

  m.def("rotation_from_angles", &rotation_from_angles, py::arg("pan"), py::arg("tilt"), py::arg("roll"));
  m.def(
      "project", [](const CameraState& c, const Vec3& x) { return project(c, x); }, py::arg("camera"),
      py::arg("world"), "Pixel of a world point, or None when it is behind the camera.");
  m.def(
      "unproject",
      [](const CameraState& c, const Vec2& px) {
        const Ray r = unproject(c, px);
        return std::make_pair(r.origin, r.direction);
      },
      py::arg("camera"), py::arg("pixel"), "(origin, unit direction) of the pixel's ray.");
  m.def(
      "lift_to_ground", [](const CameraState& c, const Vec2& px) { return intersect_ground(unproject(c, px)); },
      py::arg("camera"), py::arg("pixel"));
  m.def(
      "tripod_residual", [](const CameraState& c, const TripodRig& r) { return tripod_residual(c, r); },
      py::arg("camera"), py::arg("rig"));
  m.def("camera_on_rig", &camera_on_rig, py::arg("rig"), py::arg("pan"), py::arg("tilt"), py::arg("roll"),
        py::arg("lambda_"), py::arg("focal"), py::arg("k1"), py::arg("image") = ImageSize{});
  m.def(
      "fit_rig", [](const std::vector<CameraState>& cams) { return fit_rig(cams); }, py::arg("cameras"));
  m.def(
      "class_names",
      []() {
        std::vector<std::string> out;
        for (ElementClass c : all_element_classes()) out.emplace_back(class_name(c));
        return out;
      },
      "Canonical field element class names.");

  m.def(
      "simulate",
      [](const std::optional<std::string>& spec, std::optional<std::uint64_t> seed, const std::string& what) {
        if (what != "detections" && what != "annotations" && what != "truth") {
          throw Error(ErrorCode::kInvalidArgument, "what must be detections, annotations or truth");
        }
        return simulate_jsonl(spec, seed, what);
      },
      py::arg("spec") = py::none(), py::arg("seed") = py::none(), py::arg("what") = "detections",
      "JSON Lines text of a simulated sequence.");

  m.def(
      "track",
      [](const std::string& detections, const std::optional<std::string>& config, std::optional<TripodRig> rig) {
        const RunConfig c = config_or_default(config);
        std::istringstream in(detections);
        const auto frames = read_detections(in, c.field, c.aliases);
        const FieldTemplate field = build_template(c.field);
        std::vector<TrackReport> reports;
        {
          py::gil_scoped_release release;
          reports = track_sequence(frames, field, rig ? *rig : c.default_rig(), c.tracker);
        }
        std::ostringstream os;
        write_reports(os, reports);
        return os.str();
      },
      py::arg("detections"), py::arg("config") = py::none(), py::arg("rig") = py::none(),
      "Track a JSON Lines detection sequence; returns JSON Lines reports.");

  m.def(
      "evaluate",
      [](const std::string& reports_text, const std::string& annotations_text, const std::vector<double>& taus) {
        std::istringstream rin(reports_text), ain(annotations_text);
        const auto reports = read_reports(rin);
        const auto annotations = read_annotations(ain);
        if (annotations.empty()) throw Error(ErrorCode::kParse, "annotations: no frames");
        const FieldTemplate field;
        const auto scores = score_reports(reports, annotations, field, taus);
        return summary_to_json(aggregate(scores, static_cast<int>(annotations.size()))).dump();
      },
      py::arg("reports"), py::arg("annotations"), py::arg("taus") = std::vector<double>{5.0, 10.0},
      "Summary JSON: jac_percent per tau, mre, medre, completeness_percent.");

  m.def(
      "default_config", []() { return config_to_json(RunConfig{}).dump(); }, "Default run configuration JSON.");
}
