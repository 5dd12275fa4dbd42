#include "pitchcam/sim.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "pitchcam/error.hpp"
#include "pitchcam/render.hpp"

namespace pitchcam {
namespace {

constexpr double kPlayerHeightM = 1.8;
constexpr double kPlayerWidthM = 0.6;

void add_disc_pixels(std::vector<Pixel>& out, const Vec2& a, const Vec2& b, double radius, const ImageSize& image) {
  const int x0 = std::max(0, static_cast<int>(std::ceil(std::min(a.x(), b.x()) - radius)));
  const int x1 = std::min(image.width - 1, static_cast<int>(std::floor(std::max(a.x(), b.x()) + radius)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(std::min(a.y(), b.y()) - radius)));
  const int y1 = std::min(image.height - 1, static_cast<int>(std::floor(std::max(a.y(), b.y()) + radius)));
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double r2 = radius * radius;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 q(x, y);
      const double t = len2 > 0.0 ? std::clamp((q - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
      if ((q - (a + t * ab)).squaredNorm() <= r2) out.push_back({x, y});
    }
  }
}

void sort_unique(std::vector<Pixel>& pixels) {
  std::sort(pixels.begin(), pixels.end(), [](const Pixel& a, const Pixel& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());
}

// Point where the segment from `inside` to `outside` leaves [0, w] x [0, h].
Vec2 border_crossing(const Vec2& inside, const Vec2& outside, const ImageSize& image) {
  const Vec2 d = outside - inside;
  double t_exit = 1.0;
  auto limit = [&](double p, double dp, double lo, double hi) {
    if (dp > 0.0) t_exit = std::min(t_exit, (hi - p) / dp);
    if (dp < 0.0) t_exit = std::min(t_exit, (lo - p) / dp);
  };
  limit(inside.x(), d.x(), 0.0, image.width);
  limit(inside.y(), d.y(), 0.0, image.height);
  return inside + std::max(0.0, t_exit) * d;
}

std::size_t min_annotation_points(const GeometricElement& e) {
  if (std::holds_alternative<PointMark>(e)) return 1;
  if (std::holds_alternative<Segment>(e)) return 2;
  return 3;
}

Vec2 uniform_in_annulus(std::mt19937_64& rng, double r_min, double r_max) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> radius(r_min, r_max);
  const double a = angle(rng), r = radius(rng);
  return Vec2(r * std::cos(a), r * std::sin(a));
}

struct Player {
  Vec3 feet;
  Vec2 motion;
};

std::optional<Box> player_box(const CameraProjector& projector, const ImageSize& image, const Player& p) {
  const auto feet = projector.project_valid(p.feet);
  const auto head = projector.project_valid(p.feet - Vec3(0, 0, kPlayerHeightM));
  if (!feet || !head) return std::nullopt;
  const double h = feet->y() - head->y();
  const double w = h * kPlayerWidthM / kPlayerHeightM;
  const Box b{feet->x() - 0.5 * w, head->y(), feet->x() + 0.5 * w, feet->y()};
  if (b.xmax < 0 || b.ymax < 0 || b.xmin >= image.width || b.ymin >= image.height) return std::nullopt;
  return b;
}

}  // namespace

double Profile::at(double t) const {
  double v = base;
  for (const Sinusoid& s : terms) v += s.amplitude * std::sin(2.0 * kPi * t / s.period_frames + s.phase);
  return v;
}

TrajectorySpec zero_noise(TrajectorySpec spec) {
  spec.noise = NoiseSpec{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  spec.player_boxes = 0;
  return spec;
}

CameraState truth_camera(const TrajectorySpec& spec, int t) {
  return camera_on_rig(spec.rig, deg2rad(spec.pan_deg.at(t)), deg2rad(spec.tilt_deg.at(t)), deg2rad(spec.roll_deg),
                       spec.lambda_m.at(t), spec.focal_px.at(t), spec.k1, spec.image);
}

std::vector<Pixel> rasterize_element(const CameraState& cam, const FieldTemplate& field, ElementClass c,
                                     double stroke_px) {
  const ProjectedPolyline pl = project_polyline(cam, field.mask_samples(c));
  const double radius = 0.5 * stroke_px;
  const int n = static_cast<int>(pl.pixels.size());
  const int segments = pl.closed ? n : n - 1;
  std::vector<unsigned char> covered(n, 0);
  std::vector<Pixel> out;
  for (int i = 0; i < segments && n > 1; ++i) {
    const int j = (i + 1) % n;
    if (pl.usable[i] && pl.usable[j]) {
      add_disc_pixels(out, pl.pixels[i], pl.pixels[j], radius, cam.image);
      covered[i] = covered[j] = 1;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (pl.usable[i] && !covered[i]) add_disc_pixels(out, pl.pixels[i], pl.pixels[i], radius, cam.image);
  }
  sort_unique(out);
  return out;
}

FrameAnnotation annotate(const CameraState& cam, const FieldTemplate& field, int stride) {
  stride = std::max(1, stride);
  FrameAnnotation out;
  for (ElementClass c : all_element_classes()) {
    const ProjectedPolyline pl = project_polyline(cam, field.loss_samples(c));
    const int n = static_cast<int>(pl.pixels.size());
    auto inside = [&](int i) { return pl.usable[i] && in_image(cam.image, pl.pixels[i]); };
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) {
      const int prev = pl.closed ? (i + n - 1) % n : i - 1;
      const int next = pl.closed ? (i + 1) % n : i + 1;
      const bool has_prev = prev >= 0 && prev != i;
      const bool has_next = next < n && next != i;
      if (inside(i)) {
        if (has_prev && pl.usable[prev] && !inside(prev)) pts.push_back(border_crossing(pl.pixels[i], pl.pixels[prev], cam.image));
        const bool run_edge = !has_prev || !has_next || !inside(prev) || !inside(next);
        if (i % stride == 0 || run_edge) pts.push_back(pl.pixels[i]);
        if (has_next && pl.usable[next] && !inside(next)) pts.push_back(border_crossing(pl.pixels[i], pl.pixels[next], cam.image));
      }
    }
    if (!pts.empty() && pts.size() >= min_annotation_points(field.element(c))) out[c] = std::move(pts);
  }
  return out;
}

std::vector<SyntheticFrame> generate(const TrajectorySpec& spec) {
  if (spec.frames < 0) throw Error(ErrorCode::kInvalidArgument, "negative frame count");
  const FieldTemplate field = build_template(spec.field);
  const auto catalog = keypoint_catalog(spec.field);
  const double stroke = spec.stroke_px > 0.0 ? spec.stroke_px : default_stroke_px(spec.image);
  const double hl = 0.5 * spec.field.length, hw = 0.5 * spec.field.width;

  std::vector<Player> players;
  {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> ux(-0.6 * hl, 0.6 * hl), uy(-0.8 * hw, 0.8 * hw);
    for (int i = 0; i < spec.player_boxes; ++i) {
      Player p;
      p.feet = Vec3(ux(rng), uy(rng), 0.0);
      p.motion = uniform_in_annulus(rng, spec.player_motion_px, spec.player_motion_px);
      players.push_back(p);
    }
  }

  auto in_dropout = [&](int t) {
    return std::any_of(spec.dropouts.begin(), spec.dropouts.end(),
                       [t](const DropoutWindow& w) { return t >= w.first && t <= w.last; });
  };

  std::vector<SyntheticFrame> frames;
  frames.reserve(spec.frames);
  for (int t = 0; t < spec.frames; ++t) {
    std::seed_seq seq{static_cast<std::uint64_t>(spec.seed), static_cast<std::uint64_t>(t)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SyntheticFrame f;
    f.frame_index = t;
    f.truth = truth_camera(spec, t);
    if (f.truth.rotation().row(2).z() <= 0.0) {
      throw Error(ErrorCode::kPitchOutOfView, "frame " + std::to_string(t) + " looks above the horizon");
    }
    f.annotation = annotate(f.truth, field, spec.annotation_stride);
    if (static_cast<int>(f.annotation.size()) < spec.min_visible_classes) {
      throw Error(ErrorCode::kPitchOutOfView, "frame " + std::to_string(t) + " sees too few field elements");
    }
    f.segmentation.image = spec.image;
    const CameraProjector projector(f.truth);

    for (const Player& p : players) {
      if (auto b = player_box(projector, spec.image, p)) f.boxes.push_back(*b);
    }

    if (in_dropout(t)) {
      frames.push_back(std::move(f));
      continue;
    }

    for (ElementClass c : all_element_classes()) {
      std::vector<Pixel> px = rasterize_element(f.truth, field, c, stroke);
      if (px.empty()) continue;
      if (spec.noise.marking_sigma_px > 0.0) {
        for (Pixel& p : px) {
          p.x = std::clamp(p.x + static_cast<int>(std::lround(spec.noise.marking_sigma_px * gauss(rng))), 0,
                           spec.image.width - 1);
          p.y = std::clamp(p.y + static_cast<int>(std::lround(spec.noise.marking_sigma_px * gauss(rng))), 0,
                           spec.image.height - 1);
        }
        sort_unique(px);
      }
      f.segmentation.pixels[c] = std::move(px);
    }

    for (const NamedKeypoint& kp : catalog) {
      const auto px = projector.project_valid(kp.position);
      if (!px || !in_image(spec.image, *px)) continue;
      Vec2 xy = *px + spec.noise.keypoint_sigma_px * Vec2(gauss(rng), gauss(rng));
      if (unit(rng) < spec.noise.keypoint_outlier_rate) {
        xy += uniform_in_annulus(rng, std::min(20.0, spec.noise.keypoint_outlier_px), spec.noise.keypoint_outlier_px);
      }
      f.keypoints.push_back({xy, kp.position, kp.name});
    }

    if (t > 0 && !in_dropout(t - 1)) {
      const CameraState& prev = frames.back().truth;
      const CameraProjector prev_projector(prev);
      std::uniform_real_distribution<double> ux(0.0, spec.image.width), uy(0.0, spec.image.height);
      for (int k = 0; k < spec.flow_points; ++k) {
        const Vec2 previous(ux(rng), uy(rng));
        Vec3 ground;
        try {
          ground = intersect_ground(unproject(prev, previous));
        } catch (const Error&) {
          continue;
        }
        if (std::abs(ground.x()) > hl || std::abs(ground.y()) > hw) continue;
        const auto current = projector.project_valid(ground);
        if (!current || !in_image(spec.image, *current)) continue;
        Vec2 cur = *current + spec.noise.flow_sigma_px * Vec2(gauss(rng), gauss(rng));
        // Pixels on a player follow the player, not the ground.
        for (const Player& p : players) {
          const auto box = player_box(prev_projector, spec.image, p);
          if (box && box->contains(previous)) {
            cur += p.motion;
            break;
          }
        }
        if (unit(rng) < spec.noise.flow_outlier_rate) cur += uniform_in_annulus(rng, 5.0, spec.noise.flow_outlier_px);
        f.flow.push_back({previous, cur});
      }
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace pitchcam
