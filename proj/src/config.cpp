#include "pitchcam/config.hpp"

#include <cstdint>
#include <variant>
#include <vector>

#include "pitchcam/error.hpp"

namespace pitchcam {
namespace {

using FieldRef = std::variant<double*, int*, bool*, std::uint64_t*, std::string*>;
using Section = std::vector<std::pair<const char*, FieldRef>>;

Json section_to_json(const Section& section) {
  Json j = Json::object();
  for (const auto& [name, ref] : section) {
    std::visit([&, key = name](auto* p) { j[key] = *p; }, ref);
  }
  return j;
}

void section_from_json(const Json& j, const Section& section, const std::string& context) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, context + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    const auto it = std::find_if(section.begin(), section.end(), [&](const auto& e) { return key == e.first; });
    if (it == section.end()) throw Error(ErrorCode::kParse, context + ": unknown key \"" + key + "\"");
    try {
      std::visit([&](auto* p) { *p = value.get<std::remove_pointer_t<decltype(p)>>(); }, it->second);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, context + "." + key + ": " + e.what());
    }
  }
}

// Sections over a mutable config, shared by both directions.
std::vector<std::pair<const char*, Section>> sections(RunConfig& c) {
  TrackerSettings& t = c.tracker;
  SolverSettings& s = t.solver;
  ReinitSettings& r = t.reinit;
  MeanShiftSettings& m = t.mean_shift;
  return {
      {"field", {{"length", &c.field.length}, {"width", &c.field.width}}},
      {"solver",
       {{"omega", &s.omega},
        {"cauchy_scale_px", &s.cauchy_scale_px},
        {"residual_cap_px", &s.residual_cap_px},
        {"k1_limit", &s.k1_limit},
        {"max_iterations", &s.max_iterations},
        {"initial_damping", &s.initial_damping},
        {"damping_up", &s.damping_up},
        {"damping_down", &s.damping_down},
        {"step_tolerance", &s.step_tolerance},
        {"cost_tolerance", &s.cost_tolerance}}},
      {"toggles",
       {{"use_flow", &t.toggles.use_flow}, {"use_tripod", &t.toggles.use_tripod}, {"use_k1", &t.toggles.use_k1}}},
      {"tracker",
       {{"flow_gate", &t.flow_gate},
        {"reinit_threshold", &t.reinit_threshold},
        {"lost_threshold", &t.lost_threshold},
        {"lost_after_frames", &t.lost_after_frames},
        {"inlier_threshold_px", &t.inlier_threshold_px},
        {"stroke_px", &t.stroke_px},
        {"bandwidth_px", &t.bandwidth_px},
        {"box_margin_px", &t.box_margin_px}}},
      {"observe",
       {{"seed_stride", &m.seed_stride},
        {"convergence_px", &m.convergence_px},
        {"max_iterations", &m.max_iterations},
        {"centerline_refine", &m.centerline_refine},
        {"border_margin_fraction", &m.border_margin_fraction}}},
      {"reinit",
       {{"ransac_threshold_px", &r.ransac_threshold_px},
        {"max_hypotheses", &r.max_hypotheses},
        {"early_exit_inlier_ratio", &r.early_exit_inlier_ratio},
        {"pan_tilt_iterations", &r.pan_tilt_iterations},
        {"pan_tilt_tolerance", &r.pan_tilt_tolerance},
        {"literal_sum", &r.literal_sum},
        {"min_focal_px", &r.min_focal_px},
        {"max_focal_px", &r.max_focal_px},
        {"seed", &r.seed}}},
      {"paths",
       {{"detections", &c.paths.detections},
        {"annotations", &c.paths.annotations},
        {"output", &c.paths.output},
        {"rig", &c.paths.rig}}},
  };
}

}  // namespace

TripodRig RunConfig::default_rig() const {
  const auto it = cameras.find(camera_role);
  if (it == cameras.end()) throw Error(ErrorCode::kInvalidArgument, "unknown camera role \"" + camera_role + "\"");
  return TripodRig{it->second, rig_offset_m};
}

Json config_to_json(const RunConfig& config) {
  RunConfig c = config;
  Json j;
  j["aliases"] = c.aliases;
  Json cams = Json::object();
  for (const auto& [role, pos] : c.cameras) cams[role] = Json::array({pos.x(), pos.y(), pos.z()});
  j["cameras"] = cams;
  j["camera_role"] = c.camera_role;
  j["rig_offset_m"] = c.rig_offset_m;
  for (const auto& [name, section] : sections(c)) j[name] = section_to_json(section);
  return j;
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "config: expected an object");
  RunConfig c;
  auto secs = sections(c);
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "aliases") {
        c.aliases = value.get<ClassAliases>();
        for (const auto& [from, to] : c.aliases) {
          if (!class_from_name(to)) throw Error(ErrorCode::kParse, "aliases: unknown class \"" + to + "\"");
        }
      } else if (key == "cameras") {
        c.cameras.clear();
        for (const auto& [role, pos] : value.items()) {
          if (!pos.is_array() || pos.size() != 3) throw Error(ErrorCode::kParse, "cameras." + role + ": expected [x, y, z]");
          c.cameras[role] = Vec3(pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>());
        }
      } else if (key == "camera_role") {
        c.camera_role = value.get<std::string>();
      } else if (key == "rig_offset_m") {
        c.rig_offset_m = value.get<double>();
      } else {
        const auto it = std::find_if(secs.begin(), secs.end(), [&](const auto& s) { return key == s.first; });
        if (it == secs.end()) throw Error(ErrorCode::kParse, "config: unknown key \"" + key + "\"");
        section_from_json(value, it->second, key);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, "config." + key + ": " + e.what());
    }
  }
  if (!c.cameras.count(c.camera_role)) {
    throw Error(ErrorCode::kParse, "config: camera_role \"" + c.camera_role + "\" has no position");
  }
  build_template(c.field);  // validates the dimensions
  return c;
}

}  // namespace pitchcam
