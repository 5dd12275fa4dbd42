#include "pitchcam/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pitchcam/error.hpp"

namespace pitchcam {
namespace {

constexpr std::array<std::string_view, kNumElementClasses> kClassNames = {
    "Big rect. left bottom",
    "Big rect. left main",
    "Big rect. left top",
    "Big rect. right bottom",
    "Big rect. right main",
    "Big rect. right top",
    "Circle central",
    "Circle left",
    "Circle right",
    "Goal left crossbar",
    "Goal left post left",
    "Goal left post right",
    "Goal right crossbar",
    "Goal right post left",
    "Goal right post right",
    "Middle line",
    "Side line bottom",
    "Side line left",
    "Side line right",
    "Side line top",
    "Small rect. left bottom",
    "Small rect. left main",
    "Small rect. left top",
    "Small rect. right bottom",
    "Small rect. right main",
    "Small rect. right top",
    "Penalty mark left",
    "Penalty mark right",
    "Center mark",
};

int sample_count(double length, double step) {
  return std::max(1, static_cast<int>(std::ceil(length / step - 1e-9)));
}

// In-plane orthonormal basis (u, v) with u x v = normal.
std::pair<Vec3, Vec3> plane_basis(const Vec3& normal) {
  Vec3 u = Vec3::UnitX() - normal.dot(Vec3::UnitX()) * normal;
  if (u.norm() < 1e-6) u = Vec3::UnitY() - normal.dot(Vec3::UnitY()) * normal;
  u.normalize();
  return {u, normal.cross(u)};
}

Vec3 circle_point(const Circle& c, const Vec3& u, const Vec3& v, double angle) {
  return c.center + c.radius * (std::cos(angle) * u + std::sin(angle) * v);
}

}  // namespace

const std::array<ElementClass, kNumElementClasses>& all_element_classes() {
  static const auto classes = [] {
    std::array<ElementClass, kNumElementClasses> out{};
    for (int i = 0; i < kNumElementClasses; ++i) out[i] = static_cast<ElementClass>(i);
    return out;
  }();
  return classes;
}

std::string_view class_name(ElementClass c) { return kClassNames.at(static_cast<int>(c)); }

std::optional<ElementClass> class_from_name(std::string_view name) {
  for (int i = 0; i < kNumElementClasses; ++i) {
    if (kClassNames[i] == name) return static_cast<ElementClass>(i);
  }
  return std::nullopt;
}

Polyline sample_element(const GeometricElement& element, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sampling step must be positive");
  Polyline out;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Segment>) {
          const int n = sample_count((e.b - e.a).norm(), step);
          out.points.reserve(n + 1);
          for (int i = 0; i <= n; ++i) out.points.push_back(e.a + (e.b - e.a) * (double(i) / n));
        } else if constexpr (std::is_same_v<T, Circle>) {
          const auto [u, v] = plane_basis(e.normal);
          const int n = std::max(3, sample_count(2.0 * kPi * e.radius, step));
          out.points.reserve(n);
          for (int i = 0; i < n; ++i) out.points.push_back(circle_point(e, u, v, 2.0 * kPi * i / n));
          out.closed = true;
        } else if constexpr (std::is_same_v<T, Arc>) {
          const auto [u, v] = plane_basis(e.circle.normal);
          const int n = sample_count(e.circle.radius * std::abs(e.end - e.start), step);
          out.points.reserve(n + 1);
          for (int i = 0; i <= n; ++i) {
            out.points.push_back(circle_point(e.circle, u, v, e.start + (e.end - e.start) * (double(i) / n)));
          }
        } else {
          out.points.push_back(e.position);
        }
      },
      element);
  return out;
}

FieldTemplate::FieldTemplate(const FieldDimensions& dims) : dims_(dims) {
  using D = FieldDimensions;
  const double hl = dims.length / 2.0, hw = dims.width / 2.0;
  const double pa = D::kPenaltyAreaWidth / 2.0, ga = D::kGoalAreaWidth / 2.0, gw = D::kGoalWidth / 2.0;
  const double gh = -D::kGoalHeight;
  auto seg = [](double x0, double y0, double z0, double x1, double y1, double z1) {
    return Segment{Vec3(x0, y0, z0), Vec3(x1, y1, z1)};
  };
  using C = ElementClass;
  auto& e = elements_;

  e[C::kSideLineTop] = seg(-hl, -hw, 0, hl, -hw, 0);
  e[C::kSideLineBottom] = seg(-hl, hw, 0, hl, hw, 0);
  e[C::kSideLineLeft] = seg(-hl, -hw, 0, -hl, hw, 0);
  e[C::kSideLineRight] = seg(hl, -hw, 0, hl, hw, 0);
  e[C::kMiddleLine] = seg(0, -hw, 0, 0, hw, 0);

  const double big = hl - D::kPenaltyAreaDepth, small = hl - D::kGoalAreaDepth;
  e[C::kBigRectLeftMain] = seg(-big, -pa, 0, -big, pa, 0);
  e[C::kBigRectLeftTop] = seg(-hl, -pa, 0, -big, -pa, 0);
  e[C::kBigRectLeftBottom] = seg(-hl, pa, 0, -big, pa, 0);
  e[C::kBigRectRightMain] = seg(big, -pa, 0, big, pa, 0);
  e[C::kBigRectRightTop] = seg(big, -pa, 0, hl, -pa, 0);
  e[C::kBigRectRightBottom] = seg(big, pa, 0, hl, pa, 0);

  e[C::kSmallRectLeftMain] = seg(-small, -ga, 0, -small, ga, 0);
  e[C::kSmallRectLeftTop] = seg(-hl, -ga, 0, -small, -ga, 0);
  e[C::kSmallRectLeftBottom] = seg(-hl, ga, 0, -small, ga, 0);
  e[C::kSmallRectRightMain] = seg(small, -ga, 0, small, ga, 0);
  e[C::kSmallRectRightTop] = seg(small, -ga, 0, hl, -ga, 0);
  e[C::kSmallRectRightBottom] = seg(small, ga, 0, hl, ga, 0);

  e[C::kCircleCentral] = Circle{Vec3::Zero(), D::kCircleRadius, Vec3::UnitZ()};
  // Penalty arcs: the part of the 9.15 m circle around the spot lying outside
  // the penalty area.
  const double spot = hl - D::kPenaltySpot;
  const double half_angle = std::acos((D::kPenaltyAreaDepth - D::kPenaltySpot) / D::kCircleRadius);
  e[C::kCircleLeft] = Arc{Circle{Vec3(-spot, 0, 0), D::kCircleRadius, Vec3::UnitZ()}, -half_angle, half_angle};
  e[C::kCircleRight] =
      Arc{Circle{Vec3(spot, 0, 0), D::kCircleRadius, Vec3::UnitZ()}, kPi - half_angle, kPi + half_angle};

  e[C::kGoalLeftPostLeft] = seg(-hl, gw, 0, -hl, gw, gh);
  e[C::kGoalLeftPostRight] = seg(-hl, -gw, 0, -hl, -gw, gh);
  e[C::kGoalLeftCrossbar] = seg(-hl, -gw, gh, -hl, gw, gh);
  e[C::kGoalRightPostLeft] = seg(hl, -gw, 0, hl, -gw, gh);
  e[C::kGoalRightPostRight] = seg(hl, gw, 0, hl, gw, gh);
  e[C::kGoalRightCrossbar] = seg(hl, -gw, gh, hl, gw, gh);

  e[C::kPenaltyMarkLeft] = PointMark{Vec3(-spot, 0, 0)};
  e[C::kPenaltyMarkRight] = PointMark{Vec3(spot, 0, 0)};
  e[C::kCenterMark] = PointMark{Vec3::Zero()};

  for (const auto& [c, element] : elements_) {
    loss_samples_[c] = sample_element(element, kLossSamplingStep);
    mask_samples_[c] = sample_element(element, kMaskSamplingStep);
  }
}

const GeometricElement& FieldTemplate::element(ElementClass c) const { return elements_.at(c); }
const Polyline& FieldTemplate::loss_samples(ElementClass c) const { return loss_samples_.at(c); }
const Polyline& FieldTemplate::mask_samples(ElementClass c) const { return mask_samples_.at(c); }

FieldTemplate build_template(const FieldDimensions& dims) {
  if (!(dims.length >= 90.0 && dims.length <= 120.0 && dims.width >= 45.0 && dims.width <= 90.0)) {
    throw Error(ErrorCode::kInvalidDimensions, "pitch must be 90-120 m long and 45-90 m wide");
  }
  return FieldTemplate(dims);
}

bool ProjectedPolyline::any_usable() const {
  for (unsigned char u : usable) {
    if (u) return true;
  }
  return false;
}

ProjectedPolyline project_polyline(const CameraState& cam, const Polyline& polyline) {
  ProjectedPolyline out;
  out.closed = polyline.closed;
  out.pixels.resize(polyline.points.size(), Vec2::Zero());
  out.usable.assign(polyline.points.size(), 0);
  const CameraProjector projector(cam);
  for (std::size_t i = 0; i < polyline.points.size(); ++i) {
    if (auto px = projector.project_valid(polyline.points[i])) {
      out.pixels[i] = *px;
      out.usable[i] = 1;
    }
  }
  return out;
}

std::optional<ClosestPoint> closest_point(const ProjectedPolyline& pl, const Vec2& q) {
  const int n = static_cast<int>(pl.pixels.size());
  ClosestPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  bool found = false;

  auto consider_segment = [&](int i, int j) {
    const Vec2& a = pl.pixels[i];
    const Vec2 ab = pl.pixels[j] - a;
    const double len2 = ab.squaredNorm();
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
    const Vec2 p = a + t * ab;
    const double d = (q - p).norm();
    if (d < best.distance) {
      best = ClosestPoint{d, i, j, t, p};
      found = true;
    }
  };

  const int segments = pl.closed ? n : n - 1;
  std::vector<unsigned char> covered(n, 0);
  for (int i = 0; i < segments && n > 1; ++i) {
    const int j = (i + 1) % n;
    if (pl.usable[i] && pl.usable[j]) {
      consider_segment(i, j);
      covered[i] = covered[j] = 1;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (pl.usable[i] && !covered[i]) consider_segment(i, i);
  }
  if (!found) return std::nullopt;
  return best;
}

double distance_to_projected_element(const CameraState& cam, const Polyline& samples, const Vec2& pixel) {
  const auto closest = closest_point(project_polyline(cam, samples), pixel);
  if (!closest) throw Error(ErrorCode::kFullyBehind, "no sample of the element projects into the camera");
  return closest->distance;
}

double distance_to_projected_element(const CameraState& cam, const GeometricElement& element,
                                     const Vec2& pixel) {
  return distance_to_projected_element(cam, sample_element(element, kLossSamplingStep), pixel);
}

std::vector<NamedKeypoint> keypoint_catalog(const FieldDimensions& dims) {
  using D = FieldDimensions;
  const double hl = dims.length / 2.0, hw = dims.width / 2.0;
  const double pa = D::kPenaltyAreaWidth / 2.0, ga = D::kGoalAreaWidth / 2.0;
  const double big = hl - D::kPenaltyAreaDepth, small = hl - D::kGoalAreaDepth;
  const double spot = hl - D::kPenaltySpot;
  const double arc_y = std::sqrt(D::kCircleRadius * D::kCircleRadius -
                                 (D::kPenaltyAreaDepth - D::kPenaltySpot) * (D::kPenaltyAreaDepth - D::kPenaltySpot));
  auto g = [](double x, double y) { return Vec3(x, y, 0.0); };
  return {
      {"Corner top left", g(-hl, -hw)},
      {"Corner bottom left", g(-hl, hw)},
      {"Corner top right", g(hl, -hw)},
      {"Corner bottom right", g(hl, hw)},
      {"Middle line top", g(0, -hw)},
      {"Middle line bottom", g(0, hw)},
      {"Center mark", g(0, 0)},
      {"Circle central top", g(0, -D::kCircleRadius)},
      {"Circle central bottom", g(0, D::kCircleRadius)},
      {"Penalty mark left", g(-spot, 0)},
      {"Penalty mark right", g(spot, 0)},
      {"Big rect. left top goal line", g(-hl, -pa)},
      {"Big rect. left bottom goal line", g(-hl, pa)},
      {"Big rect. left top corner", g(-big, -pa)},
      {"Big rect. left bottom corner", g(-big, pa)},
      {"Big rect. right top goal line", g(hl, -pa)},
      {"Big rect. right bottom goal line", g(hl, pa)},
      {"Big rect. right top corner", g(big, -pa)},
      {"Big rect. right bottom corner", g(big, pa)},
      {"Small rect. left top goal line", g(-hl, -ga)},
      {"Small rect. left bottom goal line", g(-hl, ga)},
      {"Small rect. left top corner", g(-small, -ga)},
      {"Small rect. left bottom corner", g(-small, ga)},
      {"Small rect. right top goal line", g(hl, -ga)},
      {"Small rect. right bottom goal line", g(hl, ga)},
      {"Small rect. right top corner", g(small, -ga)},
      {"Small rect. right bottom corner", g(small, ga)},
      {"Circle left top", g(-big, -arc_y)},
      {"Circle left bottom", g(-big, arc_y)},
      {"Circle right top", g(big, -arc_y)},
      {"Circle right bottom", g(big, arc_y)},
  };
}

std::optional<Vec3> find_keypoint(const std::vector<NamedKeypoint>& catalog, std::string_view name) {
  for (const auto& k : catalog) {
    if (k.name == name) return k.position;
  }
  return std::nullopt;
}

}  // namespace pitchcam
