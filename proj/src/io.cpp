#include "pitchcam/io.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "pitchcam/error.hpp"

namespace pitchcam {
namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::kParse, what); }

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view context) {
  if (!j.is_object()) parse_error(std::string(context) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      parse_error(std::string(context) + ": unknown key \"" + key + "\"");
    }
  }
}

template <typename T>
T get(const Json& j, const char* key, std::string_view context) {
  const auto it = j.find(key);
  if (it == j.end()) parse_error(std::string(context) + ": missing \"" + key + "\"");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_error(std::string(context) + ": bad \"" + key + "\": " + e.what());
  }
}

template <typename T>
void get_opt(const Json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_error(std::string("bad \"") + key + "\": " + e.what());
  }
}

Json vec2_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }
Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec2 vec2_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) parse_error("expected [x, y]");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

Vec3 vec3_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) parse_error("expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Json image_json(const ImageSize& s) { return Json::array({s.width, s.height}); }

ImageSize image_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) parse_error("expected image [w, h]");
  ImageSize s{j[0].get<int>(), j[1].get<int>()};
  if (s.width <= 0 || s.height <= 0) parse_error("image size must be positive");
  return s;
}

// Row-major runs of consecutive pixels.
Json encode_rle(std::vector<Pixel> pixels) {
  std::sort(pixels.begin(), pixels.end(), [](const Pixel& a, const Pixel& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());
  Json runs = Json::array();
  std::size_t i = 0;
  while (i < pixels.size()) {
    std::size_t k = i + 1;
    while (k < pixels.size() && pixels[k].y == pixels[i].y && pixels[k].x == pixels[k - 1].x + 1) ++k;
    runs.push_back(Json::array({pixels[i].y, pixels[i].x, static_cast<int>(k - i)}));
    i = k;
  }
  return runs;
}

std::vector<Pixel> decode_rle(const Json& runs) {
  if (!runs.is_array()) parse_error("rle must be an array");
  std::vector<Pixel> out;
  for (const Json& r : runs) {
    if (!r.is_array() || r.size() != 3) parse_error("rle run must be [y, x0, len]");
    const int y = r[0].get<int>(), x0 = r[1].get<int>(), len = r[2].get<int>();
    if (len < 0) parse_error("negative rle run length");
    for (int k = 0; k < len; ++k) out.push_back({x0 + k, y});
  }
  return out;
}

template <typename F>
auto with_line(std::istream& in, F&& f) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    try {
      f(Json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      parse_error("line " + std::to_string(number) + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kParse) throw;
      parse_error("line " + std::to_string(number) + ": " + e.what());
    }
  }
}

Json profile_json(const Profile& p) {
  Json terms = Json::array();
  for (const Sinusoid& s : p.terms) {
    terms.push_back({{"amplitude", s.amplitude}, {"period_frames", s.period_frames}, {"phase", s.phase}});
  }
  return {{"base", p.base}, {"terms", terms}};
}

Profile profile_from(const Json& j, const Profile& defaults) {
  check_keys(j, {"base", "terms"}, "profile");
  Profile p = defaults;
  get_opt(j, "base", p.base);
  if (j.contains("terms")) {
    p.terms.clear();
    for (const Json& t : j.at("terms")) {
      check_keys(t, {"amplitude", "period_frames", "phase"}, "profile term");
      Sinusoid s;
      get_opt(t, "amplitude", s.amplitude);
      get_opt(t, "period_frames", s.period_frames);
      get_opt(t, "phase", s.phase);
      if (!(s.period_frames != 0.0)) parse_error("profile term period must be nonzero");
      p.terms.push_back(s);
    }
  }
  return p;
}

}  // namespace

ElementClass resolve_class(const std::string& name, const ClassAliases& aliases) {
  const auto it = aliases.find(name);
  const std::string& canonical = it == aliases.end() ? name : it->second;
  if (auto c = class_from_name(canonical)) return *c;
  parse_error("unknown field element class \"" + name + "\"");
}

Json detection_to_json(const FrameInput& frame) {
  Json j;
  j["frame"] = frame.frame_index;
  j["image"] = image_json(frame.segmentation.image);
  Json markings = Json::object();
  for (const auto& [c, px] : frame.segmentation.pixels) {
    if (!px.empty()) markings[std::string(class_name(c))]["rle"] = encode_rle(px);
  }
  for (const auto& [c, pts] : frame.segmentation.points) {
    if (pts.empty()) continue;
    Json arr = Json::array();
    for (const Vec2& p : pts) arr.push_back(vec2_json(p));
    markings[std::string(class_name(c))]["points"] = arr;
  }
  j["markings"] = markings;
  Json flow = Json::array();
  for (const FlowMatch& m : frame.flow) {
    flow.push_back(Json::array({m.previous.x(), m.previous.y(), m.current.x(), m.current.y()}));
  }
  j["flow"] = flow;
  Json boxes = Json::array();
  for (const Box& b : frame.boxes) boxes.push_back(Json::array({b.xmin, b.ymin, b.xmax, b.ymax}));
  j["boxes"] = boxes;
  Json kps = Json::array();
  for (const auto& k : frame.keypoints) kps.push_back({{"name", k.name}, {"xy", vec2_json(k.image)}});
  j["keypoints"] = kps;
  return j;
}

FrameInput detection_from_json(const Json& j, const FieldDimensions& dims, const ClassAliases& aliases) {
  check_keys(j, {"frame", "image", "markings", "flow", "boxes", "keypoints"}, "detection");
  FrameInput f;
  f.frame_index = get<int>(j, "frame", "detection");
  f.segmentation.image = image_from(j.at("image"));
  if (j.contains("markings")) {
    for (const auto& [name, m] : j.at("markings").items()) {
      check_keys(m, {"rle", "points"}, "marking");
      const ElementClass c = resolve_class(name, aliases);
      if (m.contains("rle")) {
        auto px = decode_rle(m.at("rle"));
        auto& dst = f.segmentation.pixels[c];
        dst.insert(dst.end(), px.begin(), px.end());
      }
      if (m.contains("points")) {
        auto& dst = f.segmentation.points[c];
        for (const Json& p : m.at("points")) dst.push_back(vec2_from(p));
      }
    }
  }
  if (j.contains("flow")) {
    for (const Json& m : j.at("flow")) {
      if (!m.is_array() || m.size() != 4) parse_error("flow match must be [x0, y0, x1, y1]");
      f.flow.push_back({Vec2(m[0].get<double>(), m[1].get<double>()), Vec2(m[2].get<double>(), m[3].get<double>())});
    }
  }
  if (j.contains("boxes")) {
    for (const Json& b : j.at("boxes")) {
      if (!b.is_array() || b.size() != 4) parse_error("box must be [xmin, ymin, xmax, ymax]");
      f.boxes.push_back({b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()});
    }
  }
  if (j.contains("keypoints")) {
    std::vector<NamedKeypoint> catalog;
    for (const Json& k : j.at("keypoints")) {
      check_keys(k, {"name", "xy", "world"}, "keypoint");
      Correspondence2D3D c;
      c.name = get<std::string>(k, "name", "keypoint");
      c.image = vec2_from(k.at("xy"));
      if (k.contains("world")) {
        c.world = vec3_from(k.at("world"));
      } else {
        if (catalog.empty()) catalog = keypoint_catalog(dims);
        const auto w = find_keypoint(catalog, c.name);
        if (!w) parse_error("unknown keypoint \"" + c.name + "\"");
        c.world = *w;
      }
      f.keypoints.push_back(std::move(c));
    }
  }
  return f;
}

std::vector<FrameInput> read_detections(std::istream& in, const FieldDimensions& dims, const ClassAliases& aliases) {
  std::vector<FrameInput> out;
  with_line(in, [&](const Json& j) { out.push_back(detection_from_json(j, dims, aliases)); });
  return out;
}

void write_detections(std::ostream& out, const std::vector<FrameInput>& frames) {
  for (const auto& f : frames) out << detection_to_json(f).dump() << '\n';
}

Json camera_to_json(const CameraState& cam) {
  Json j;
  j["pan_deg"] = rad2deg(cam.pan);
  j["tilt_deg"] = rad2deg(cam.tilt);
  j["roll_deg"] = rad2deg(cam.roll);
  j["position_m"] = vec3_json(cam.position);
  j["f_px"] = cam.focal;
  j["k1"] = cam.k1;
  j["image"] = image_json(cam.image);
  return j;
}

CameraState camera_from_json(const Json& j) {
  check_keys(j, {"pan_deg", "tilt_deg", "roll_deg", "position_m", "f_px", "k1", "image"}, "camera");
  CameraState c;
  c.pan = deg2rad(get<double>(j, "pan_deg", "camera"));
  c.tilt = deg2rad(get<double>(j, "tilt_deg", "camera"));
  c.roll = deg2rad(get<double>(j, "roll_deg", "camera"));
  c.position = vec3_from(j.at("position_m"));
  c.focal = get<double>(j, "f_px", "camera");
  c.k1 = get<double>(j, "k1", "camera");
  c.image = image_from(j.at("image"));
  if (!(c.focal > 0.0)) parse_error("camera f_px must be positive");
  return c;
}

Json report_to_json(const TrackReport& r) {
  Json j;
  j["frame"] = r.frame_index;
  j["status"] = std::string(to_string(r.status));
  j["camera"] = r.camera ? camera_to_json(*r.camera) : Json(nullptr);
  j["s"] = r.confidence ? Json(*r.confidence) : Json(nullptr);
  j["cost"] = r.cost;
  j["mre"] = r.mre;
  j["reinit_used"] = r.reinit_used;
  return j;
}

TrackReport report_from_json(const Json& j) {
  check_keys(j, {"frame", "status", "camera", "s", "cost", "mre", "reinit_used"}, "report");
  TrackReport r;
  r.frame_index = get<int>(j, "frame", "report");
  if (j.contains("camera") && !j.at("camera").is_null()) r.camera = camera_from_json(j.at("camera"));
  if (j.contains("s") && !j.at("s").is_null()) r.confidence = j.at("s").get<double>();
  r.status = r.camera ? TrackStatus::kTracking : TrackStatus::kLost;
  if (j.contains("status")) {
    const auto s = status_from_string(j.at("status").get<std::string>());
    if (!s) parse_error("unknown status \"" + j.at("status").get<std::string>() + "\"");
    r.status = *s;
  }
  get_opt(j, "cost", r.cost);
  get_opt(j, "mre", r.mre);
  get_opt(j, "reinit_used", r.reinit_used);
  return r;
}

std::vector<TrackReport> read_reports(std::istream& in) {
  std::vector<TrackReport> out;
  with_line(in, [&](const Json& j) { out.push_back(report_from_json(j)); });
  return out;
}

void write_reports(std::ostream& out, const std::vector<TrackReport>& reports) {
  for (const auto& r : reports) out << report_to_json(r).dump() << '\n';
}

Json annotation_to_json(const AnnotatedFrame& frame) {
  Json j;
  j["frame"] = frame.frame_index;
  j["image"] = image_json(frame.image);
  Json classes = Json::object();
  for (const auto& [c, pts] : frame.annotation) {
    Json arr = Json::array();
    for (const Vec2& p : pts) arr.push_back(vec2_json(p));
    classes[std::string(class_name(c))] = arr;
  }
  j["classes"] = classes;
  return j;
}

AnnotatedFrame annotation_from_json(const Json& j, const ClassAliases& aliases) {
  check_keys(j, {"frame", "image", "classes"}, "annotation");
  AnnotatedFrame a;
  a.frame_index = get<int>(j, "frame", "annotation");
  a.image = image_from(j.at("image"));
  if (j.contains("classes")) {
    for (const auto& [name, pts] : j.at("classes").items()) {
      auto& dst = a.annotation[resolve_class(name, aliases)];
      for (const Json& p : pts) dst.push_back(vec2_from(p));
    }
  }
  return a;
}

std::vector<AnnotatedFrame> read_annotations(std::istream& in, const ClassAliases& aliases) {
  std::vector<AnnotatedFrame> out;
  with_line(in, [&](const Json& j) { out.push_back(annotation_from_json(j, aliases)); });
  return out;
}

void write_annotations(std::ostream& out, const std::vector<AnnotatedFrame>& frames) {
  for (const auto& f : frames) out << annotation_to_json(f).dump() << '\n';
}

Json rig_to_json(const TripodRig& rig) { return {{"T", vec3_json(rig.center)}, {"delta", rig.offset}}; }

TripodRig rig_from_json(const Json& j) {
  check_keys(j, {"T", "delta"}, "rig");
  TripodRig r;
  r.center = vec3_from(j.at("T"));
  r.offset = get<double>(j, "delta", "rig");
  return r;
}

Json trajectory_to_json(const TrajectorySpec& s) {
  Json j;
  j["rig"] = rig_to_json(s.rig);
  j["field"] = {{"length", s.field.length}, {"width", s.field.width}};
  j["image"] = image_json(s.image);
  j["frames"] = s.frames;
  j["pan_deg"] = profile_json(s.pan_deg);
  j["tilt_deg"] = profile_json(s.tilt_deg);
  j["lambda_m"] = profile_json(s.lambda_m);
  j["focal_px"] = profile_json(s.focal_px);
  j["roll_deg"] = s.roll_deg;
  j["k1"] = s.k1;
  const NoiseSpec& n = s.noise;
  j["noise"] = {{"marking_sigma_px", n.marking_sigma_px},     {"flow_sigma_px", n.flow_sigma_px},
                {"flow_outlier_rate", n.flow_outlier_rate},   {"flow_outlier_px", n.flow_outlier_px},
                {"keypoint_sigma_px", n.keypoint_sigma_px},   {"keypoint_outlier_rate", n.keypoint_outlier_rate},
                {"keypoint_outlier_px", n.keypoint_outlier_px}};
  Json drops = Json::array();
  for (const auto& d : s.dropouts) drops.push_back(Json::array({d.first, d.last}));
  j["dropouts"] = drops;
  j["flow_points"] = s.flow_points;
  j["player_boxes"] = s.player_boxes;
  j["player_motion_px"] = s.player_motion_px;
  j["stroke_px"] = s.stroke_px;
  j["annotation_stride"] = s.annotation_stride;
  j["min_visible_classes"] = s.min_visible_classes;
  j["seed"] = s.seed;
  return j;
}

TrajectorySpec trajectory_from_json(const Json& j) {
  check_keys(j, {"rig", "field", "image", "frames", "pan_deg", "tilt_deg", "lambda_m", "focal_px", "roll_deg", "k1",
                 "noise", "dropouts", "flow_points", "player_boxes", "player_motion_px", "stroke_px",
                 "annotation_stride", "min_visible_classes", "seed"},
             "trajectory");
  TrajectorySpec s;
  if (j.contains("rig")) s.rig = rig_from_json(j.at("rig"));
  if (j.contains("field")) {
    check_keys(j.at("field"), {"length", "width"}, "field");
    get_opt(j.at("field"), "length", s.field.length);
    get_opt(j.at("field"), "width", s.field.width);
  }
  if (j.contains("image")) s.image = image_from(j.at("image"));
  get_opt(j, "frames", s.frames);
  if (j.contains("pan_deg")) s.pan_deg = profile_from(j.at("pan_deg"), s.pan_deg);
  if (j.contains("tilt_deg")) s.tilt_deg = profile_from(j.at("tilt_deg"), s.tilt_deg);
  if (j.contains("lambda_m")) s.lambda_m = profile_from(j.at("lambda_m"), s.lambda_m);
  if (j.contains("focal_px")) s.focal_px = profile_from(j.at("focal_px"), s.focal_px);
  get_opt(j, "roll_deg", s.roll_deg);
  get_opt(j, "k1", s.k1);
  if (j.contains("noise")) {
    const Json& n = j.at("noise");
    check_keys(n, {"marking_sigma_px", "flow_sigma_px", "flow_outlier_rate", "flow_outlier_px", "keypoint_sigma_px",
                   "keypoint_outlier_rate", "keypoint_outlier_px"},
               "noise");
    get_opt(n, "marking_sigma_px", s.noise.marking_sigma_px);
    get_opt(n, "flow_sigma_px", s.noise.flow_sigma_px);
    get_opt(n, "flow_outlier_rate", s.noise.flow_outlier_rate);
    get_opt(n, "flow_outlier_px", s.noise.flow_outlier_px);
    get_opt(n, "keypoint_sigma_px", s.noise.keypoint_sigma_px);
    get_opt(n, "keypoint_outlier_rate", s.noise.keypoint_outlier_rate);
    get_opt(n, "keypoint_outlier_px", s.noise.keypoint_outlier_px);
  }
  if (j.contains("dropouts")) {
    for (const Json& d : j.at("dropouts")) {
      if (!d.is_array() || d.size() != 2) parse_error("dropout must be [first, last]");
      s.dropouts.push_back({d[0].get<int>(), d[1].get<int>()});
    }
  }
  get_opt(j, "flow_points", s.flow_points);
  get_opt(j, "player_boxes", s.player_boxes);
  get_opt(j, "player_motion_px", s.player_motion_px);
  get_opt(j, "stroke_px", s.stroke_px);
  get_opt(j, "annotation_stride", s.annotation_stride);
  get_opt(j, "min_visible_classes", s.min_visible_classes);
  get_opt(j, "seed", s.seed);
  return s;
}

Json score_to_json(const FrameScore& s) {
  Json j;
  j["frame"] = s.frame_index;
  j["camera_present"] = s.camera_present;
  j["taus"] = s.taus;
  j["tp"] = s.tp;
  j["fp"] = s.fp;
  j["fn"] = s.fn;
  j["jac"] = s.jac;
  j["mre"] = s.mre();
  return j;
}

Json summary_to_json(const EvalSummary& s) {
  Json j;
  j["taus"] = s.taus;
  j["jac_percent"] = s.jac_percent;
  j["mre"] = s.mre;
  j["medre"] = s.medre;
  j["completeness_percent"] = s.completeness_percent;
  j["frames"] = s.frames;
  j["frames_with_camera"] = s.frames_with_camera;
  return j;
}

FrameInput to_frame_input(const SyntheticFrame& f) {
  return FrameInput{f.frame_index, f.segmentation, f.flow, f.boxes, f.keypoints};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace pitchcam
