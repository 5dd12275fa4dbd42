#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pitchcam/geometry.hpp"

namespace pitchcam {

/// Semantic marking classes, named after the sn-calibration annotation
/// alphabet (plus the three painted marks).
enum class ElementClass : int {
  kBigRectLeftBottom = 0,
  kBigRectLeftMain,
  kBigRectLeftTop,
  kBigRectRightBottom,
  kBigRectRightMain,
  kBigRectRightTop,
  kCircleCentral,
  kCircleLeft,
  kCircleRight,
  kGoalLeftCrossbar,
  kGoalLeftPostLeft,
  kGoalLeftPostRight,
  kGoalRightCrossbar,
  kGoalRightPostLeft,
  kGoalRightPostRight,
  kMiddleLine,
  kSideLineBottom,
  kSideLineLeft,
  kSideLineRight,
  kSideLineTop,
  kSmallRectLeftBottom,
  kSmallRectLeftMain,
  kSmallRectLeftTop,
  kSmallRectRightBottom,
  kSmallRectRightMain,
  kSmallRectRightTop,
  kPenaltyMarkLeft,
  kPenaltyMarkRight,
  kCenterMark,
};

inline constexpr int kNumElementClasses = 29;

const std::array<ElementClass, kNumElementClasses>& all_element_classes();
std::string_view class_name(ElementClass c);
std::optional<ElementClass> class_from_name(std::string_view name);

struct Segment {
  Vec3 a;
  Vec3 b;
};

struct Circle {
  Vec3 center;
  double radius = 0.0;
  Vec3 normal = Vec3::UnitZ();
};

/// Arc of a circle between two angles (radians) measured in the circle plane
/// from its first in-plane axis, counter-clockwise about the normal.
struct Arc {
  Circle circle;
  double start = 0.0;
  double end = 0.0;
};

struct PointMark {
  Vec3 position;
};

using GeometricElement = std::variant<Segment, Circle, Arc, PointMark>;

/// Laws-of-the-game distances are fixed; length and width vary per venue.
struct FieldDimensions {
  double length = 105.0;
  double width = 68.0;

  static constexpr double kPenaltySpot = 11.0;
  static constexpr double kCircleRadius = 9.15;
  static constexpr double kPenaltyAreaDepth = 16.5;
  static constexpr double kPenaltyAreaWidth = 40.32;
  static constexpr double kGoalAreaDepth = 5.5;
  static constexpr double kGoalAreaWidth = 18.32;
  static constexpr double kGoalWidth = 7.32;
  static constexpr double kGoalHeight = 2.44;
};

struct Polyline {
  std::vector<Vec3> points;
  bool closed = false;
};

/// Consecutive samples at most `step` apart; segment and arc endpoints are
/// included, circles are returned as closed loops, a point yields one sample.
Polyline sample_element(const GeometricElement& element, double step);

inline constexpr double kLossSamplingStep = 0.10;
inline constexpr double kMaskSamplingStep = 0.05;

/// Immutable map from class to 3-D element, with cached samplings.
class FieldTemplate {
 public:
  explicit FieldTemplate(const FieldDimensions& dims = {});

  const FieldDimensions& dimensions() const { return dims_; }
  const GeometricElement& element(ElementClass c) const;
  const std::map<ElementClass, GeometricElement>& elements() const { return elements_; }

  /// Sampling at kLossSamplingStep (losses, metrics).
  const Polyline& loss_samples(ElementClass c) const;
  /// Sampling at kMaskSamplingStep (mask rendering).
  const Polyline& mask_samples(ElementClass c) const;

 private:
  FieldDimensions dims_;
  std::map<ElementClass, GeometricElement> elements_;
  std::map<ElementClass, Polyline> loss_samples_;
  std::map<ElementClass, Polyline> mask_samples_;
};

/// Throws InvalidDimensions unless length is in [90, 120] and width in [45, 90].
FieldTemplate build_template(const FieldDimensions& dims);

/// Polyline projected into an image. Samples that are behind the camera or
/// outside the trusted lens radius are marked unusable and break the line.
struct ProjectedPolyline {
  std::vector<Vec2> pixels;
  std::vector<unsigned char> usable;
  bool closed = false;

  bool any_usable() const;
};

ProjectedPolyline project_polyline(const CameraState& cam, const Polyline& polyline);

/// Closest point of a projected polyline: p = (1 - t) * pixels[first] + t * pixels[second].
struct ClosestPoint {
  double distance = 0.0;
  int first = 0;
  int second = 0;
  double t = 0.0;
  Vec2 point;
};

std::optional<ClosestPoint> closest_point(const ProjectedPolyline& projected, const Vec2& query);

/// Distance in pixels between `pixel` and the projection of the element,
/// using the default loss sampling. Throws FullyBehind when no sample projects.
double distance_to_projected_element(const CameraState& cam, const GeometricElement& element,
                                     const Vec2& pixel);
double distance_to_projected_element(const CameraState& cam, const Polyline& samples, const Vec2& pixel);

/// Named ground keypoint (mark, line intersection or line/circle intersection).
struct NamedKeypoint {
  std::string name;
  Vec3 position;
};

std::vector<NamedKeypoint> keypoint_catalog(const FieldDimensions& dims);
std::optional<Vec3> find_keypoint(const std::vector<NamedKeypoint>& catalog, std::string_view name);

}  // namespace pitchcam
