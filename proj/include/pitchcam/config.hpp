#pragma once

#include <map>
#include <string>

#include "pitchcam/io.hpp"
#include "pitchcam/tracker.hpp"

namespace pitchcam {

struct RunPaths {
  std::string detections;
  std::string annotations;
  std::string output;
  std::string rig;
};

struct RunConfig {
  FieldDimensions field;
  ClassAliases aliases;
  /// Default focal points of the usual wide-angle camera roles.
  std::map<std::string, Vec3> cameras = {
      {"main", Vec3(0.0, 55.0, -12.0)},
      {"16m_left", Vec3(-36.0, 55.0, -12.0)},
      {"16m_right", Vec3(36.0, 55.0, -12.0)},
      {"high_behind_goal", Vec3(-65.0, 0.0, -15.0)},
  };
  std::string camera_role = "main";
  double rig_offset_m = 0.0;
  TrackerSettings tracker;
  RunPaths paths;

  /// Rig at the role's default focal point with the configured offset.
  /// Throws InvalidArgument for an unknown role.
  TripodRig default_rig() const;
};

/// Every setting, defaults included.
Json config_to_json(const RunConfig& config);

/// Missing keys keep their defaults; unknown keys throw Parse.
RunConfig config_from_json(const Json& j);

}  // namespace pitchcam
