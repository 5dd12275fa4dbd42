#include "pitchcam/render.hpp"

#include <algorithm>
#include <cmath>

#include "pitchcam/error.hpp"

namespace pitchcam {
namespace {

void draw_segment(Mask& mask, const Vec2& a, const Vec2& b, double radius) {
  const ImageSize& size = mask.size();
  const int x0 = std::max(0, static_cast<int>(std::ceil(std::min(a.x(), b.x()) - radius)));
  const int x1 = std::min(size.width - 1, static_cast<int>(std::floor(std::max(a.x(), b.x()) + radius)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(std::min(a.y(), b.y()) - radius)));
  const int y1 = std::min(size.height - 1, static_cast<int>(std::floor(std::max(a.y(), b.y()) + radius)));
  if (x0 > x1 || y0 > y1) return;
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double r2 = radius * radius;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Vec2 q(x, y);
      double t = len2 > 0.0 ? (q - a).dot(ab) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      if ((q - (a + t * ab)).squaredNorm() <= r2) mask.set(x, y);
    }
  }
}

}  // namespace

Mask::Mask(const ImageSize& size) : size_(size) {
  if (size.width <= 0 || size.height <= 0) throw Error(ErrorCode::kInvalidArgument, "mask size must be positive");
  data_.assign(static_cast<std::size_t>(size.width) * size.height, 0);
}

std::size_t Mask::count() const { return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), 1)); }

std::vector<Pixel> Mask::pixels() const {
  std::vector<Pixel> out;
  for (int y = 0; y < size_.height; ++y) {
    for (int x = 0; x < size_.width; ++x) {
      if (get(x, y)) out.push_back({x, y});
    }
  }
  return out;
}

double default_stroke_px(const ImageSize& image) { return 5.0 * image.height / 1080.0; }

void draw_polyline(Mask& mask, const ProjectedPolyline& pl, double stroke_px) {
  const double radius = 0.5 * stroke_px;
  const int n = static_cast<int>(pl.pixels.size());
  const int segments = pl.closed ? n : n - 1;
  std::vector<unsigned char> covered(n, 0);
  for (int i = 0; i < segments && n > 1; ++i) {
    const int j = (i + 1) % n;
    if (pl.usable[i] && pl.usable[j]) {
      draw_segment(mask, pl.pixels[i], pl.pixels[j], radius);
      covered[i] = covered[j] = 1;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (pl.usable[i] && !covered[i]) draw_segment(mask, pl.pixels[i], pl.pixels[i], radius);
  }
}

void draw_element(Mask& mask, const CameraState& cam, const FieldTemplate& field, ElementClass c, double stroke_px) {
  draw_polyline(mask, project_polyline(cam, field.mask_samples(c)), stroke_px);
}

Mask render_template(const CameraState& cam, const FieldTemplate& field, double stroke_px) {
  Mask mask(cam.image);
  for (ElementClass c : all_element_classes()) draw_element(mask, cam, field, c, stroke_px);
  return mask;
}

Mask segmentation_mask(const SegmentationInput& seg, double stroke_px) {
  Mask mask(seg.image);
  for (const auto& [c, blob] : seg.pixels) {
    for (const Pixel& p : blob) {
      if (mask.contains(p.x, p.y)) mask.set(p.x, p.y);
    }
  }
  for (const auto& [c, pts] : seg.points) {
    for (const Vec2& p : pts) draw_segment(mask, p, p, 0.5 * stroke_px);
  }
  return mask;
}

double jaccard(const Mask& a, const Mask& b) {
  if (!(a.size() == b.size())) throw Error(ErrorCode::kInvalidArgument, "mask sizes differ");
  std::size_t inter = 0, uni = 0;
  const auto& da = a.data();
  const auto& db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    inter += da[i] & db[i];
    uni += da[i] | db[i];
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace pitchcam
