#include "pitchcam/observe.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <limits>
#include <cmath>
#include <optional>
#include <unordered_map>

#include "pitchcam/error.hpp"

namespace pitchcam {
namespace {

// Uniform grid over pixel coordinates with cells of one bandwidth.
class PixelGrid {
 public:
  PixelGrid(std::span<const Pixel> pixels, double cell) : pixels_(pixels), cell_(cell) {
    for (std::size_t i = 0; i < pixels.size(); ++i) cells_[key(cell_of(pixels[i].x), cell_of(pixels[i].y))].push_back(i);
  }

  // Mean of the pixels within `radius` of `center`; nullopt when none.
  std::optional<Vec2> window_mean(const Vec2& center, double radius) const {
    const double r2 = radius * radius;
    const long cx = cell_of(center.x()), cy = cell_of(center.y());
    double sx = 0.0, sy = 0.0;
    std::size_t count = 0;
    for (long dy = -1; dy <= 1; ++dy) {
      for (long dx = -1; dx <= 1; ++dx) {
        const auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t idx : it->second) {
          const double ex = pixels_[idx].x - center.x(), ey = pixels_[idx].y - center.y();
          if (ex * ex + ey * ey <= r2) {
            sx += pixels_[idx].x;
            sy += pixels_[idx].y;
            ++count;
          }
        }
      }
    }
    if (count == 0) return std::nullopt;
    return Vec2(sx / count, sy / count);
  }

  template <typename F>
  void for_each_index_in_window(const Vec2& center, double radius, F&& f) const {
    const double r2 = radius * radius;
    const long cx = cell_of(center.x()), cy = cell_of(center.y());
    for (long dy = -1; dy <= 1; ++dy) {
      for (long dx = -1; dx <= 1; ++dx) {
        const auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t idx : it->second) {
          const double ex = pixels_[idx].x - center.x(), ey = pixels_[idx].y - center.y();
          if (ex * ex + ey * ey <= r2) f(idx);
        }
      }
    }
  }

  template <typename F>
  void for_each_in_window(const Vec2& center, double radius, F&& f) const {
    const double r2 = radius * radius;
    const long cx = cell_of(center.x()), cy = cell_of(center.y());
    for (long dy = -1; dy <= 1; ++dy) {
      for (long dx = -1; dx <= 1; ++dx) {
        const auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t idx : it->second) {
          const Vec2 p(pixels_[idx].x, pixels_[idx].y);
          if ((p - center).squaredNorm() <= r2) f(p);
        }
      }
    }
  }

 private:
  long cell_of(double v) const { return static_cast<long>(std::floor(v / cell_)); }
  static long long key(long x, long y) { return (static_cast<long long>(x) << 32) ^ static_cast<long long>(y & 0xffffffff); }

  std::span<const Pixel> pixels_;
  double cell_;
  std::unordered_map<long long, std::vector<std::size_t>> cells_;
};

// Moves a flat-window mode onto the stroke centerline: fits the pixel offsets
// across the principal direction as a quadratic along it and keeps the fitted
// offset at the mode. Blob-like windows (marks, crossings) are left as they are.
Vec2 centerline_mode(const PixelGrid& grid, const Vec2& mode, double bandwidth) {
  std::vector<Vec2> pts;
  grid.for_each_in_window(mode, bandwidth, [&](const Vec2& p) { pts.push_back(p); });
  if (pts.size() < 6) return mode;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const Vec2& p : pts) cov += (p - mode) * (p - mode).transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const double minor = eig.eigenvalues()[0], major = eig.eigenvalues()[1];
  if (!(major > 0.0) || minor > 0.25 * major) return mode;
  const Vec2 along = eig.eigenvectors().col(1), across = eig.eigenvectors().col(0);
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (const Vec2& p : pts) {
    const double s = (p - mode).dot(along) / bandwidth;
    const Eigen::Vector3d row(1.0, s, s * s);
    ata += row * row.transpose();
    atb += row * (p - mode).dot(across);
  }
  const Eigen::LDLT<Eigen::Matrix3d> ldlt(ata);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-9) return mode;
  const Eigen::Vector3d coef = ldlt.solve(atb);
  if (!coef.allFinite() || std::abs(coef[0]) > 0.5 * bandwidth) return mode;
  return mode + coef[0] * across;
}

std::optional<Vec3> lift(const CameraState& cam, const Vec2& pixel) {
  try {
    return intersect_ground(unproject(cam, pixel));
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

bool SegmentationInput::empty() const {
  for (const auto& [c, px] : pixels) {
    if (!px.empty()) return false;
  }
  for (const auto& [c, pts] : points) {
    if (!pts.empty()) return false;
  }
  return true;
}

std::size_t FrameObservations::marking_count() const {
  std::size_t n = 0;
  for (const auto& [c, pts] : marking_points) n += pts.size();
  return n;
}

double default_bandwidth(const ImageSize& image) { return 25.0 * image.height / 1080.0; }

std::vector<Vec2> mean_shift_modes(std::span<const Pixel> blob, double bandwidth, const MeanShiftSettings& settings) {
  if (!(bandwidth > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bandwidth must be positive");
  std::vector<Vec2> modes;
  if (blob.empty()) return modes;

  std::vector<Pixel> sorted(blob.begin(), blob.end());
  std::sort(sorted.begin(), sorted.end(), [](const Pixel& a, const Pixel& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  const PixelGrid grid(sorted, bandwidth);
  auto converge = [&](const Pixel& seed) {
    Vec2 mode(seed.x, seed.y);
    for (int it = 0; it < settings.max_iterations; ++it) {
      const auto mean = grid.window_mean(mode, bandwidth);
      if (!mean) break;
      const double shift = (*mean - mode).norm();
      mode = *mean;
      if (shift < settings.convergence_px) break;
    }
    return settings.centerline_refine ? centerline_mode(grid, mode, bandwidth) : mode;
  };
  auto nearest2 = [&](const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& m : modes) best = std::min(best, (m - p).squaredNorm());
    return best;
  };

  const double merge2 = 0.25 * bandwidth * bandwidth;
  const std::size_t stride = static_cast<std::size_t>(std::max(1, settings.seed_stride));
  for (std::size_t s = 0; s < sorted.size(); s += stride) {
    const Vec2 mode = converge(sorted[s]);
    if (nearest2(mode) >= merge2) modes.push_back(mode);
  }
  // Merging can leave the ends of a stroke farther than the bandwidth from
  // every mode; those pixels seed again and keep any distinct mode they reach.
  std::vector<char> covered(sorted.size(), 0);
  auto cover = [&](const Vec2& m) { grid.for_each_index_in_window(m, bandwidth, [&](std::size_t i) { covered[i] = 1; }); };
  for (const Vec2& m : modes) cover(m);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (covered[i]) continue;
    const Vec2 mode = converge(sorted[i]);
    if (nearest2(mode) > 1.0) {
      modes.push_back(mode);
      cover(mode);
    } else {
      // Pixels no farther out than this seed fall into the same basin.
      const double reach = (Vec2(sorted[i].x, sorted[i].y) - mode).norm();
      grid.for_each_index_in_window(mode, reach, [&](std::size_t k) { covered[k] = 1; });
    }
    covered[i] = 1;
  }
  return modes;
}

std::map<ElementClass, std::vector<Vec2>> condense_markings(const SegmentationInput& seg, double bandwidth,
                                                            const MeanShiftSettings& settings) {
  std::map<ElementClass, std::vector<Vec2>> out;
  const double margin = settings.border_margin_fraction * bandwidth;
  const double xmax = seg.image.width - 1 - margin, ymax = seg.image.height - 1 - margin;
  for (const auto& [c, blob] : seg.pixels) {
    auto modes = mean_shift_modes(blob, bandwidth, settings);
    std::erase_if(modes, [&](const Vec2& m) { return m.x() < margin || m.y() < margin || m.x() > xmax || m.y() > ymax; });
    if (!modes.empty()) out[c] = std::move(modes);
  }
  for (const auto& [c, pts] : seg.points) {
    if (pts.empty()) continue;
    auto& dst = out[c];
    dst.insert(dst.end(), pts.begin(), pts.end());
  }
  return out;
}

std::vector<FlowMatch> filter_flow(std::span<const FlowMatch> matches, const CameraState& previous,
                                   std::span<const Box> boxes, const FieldTemplate& field, double margin_px) {
  const double hl = field.dimensions().length / 2.0, hw = field.dimensions().width / 2.0;
  std::vector<FlowMatch> kept;
  for (const auto& m : matches) {
    if (std::any_of(boxes.begin(), boxes.end(), [&](const Box& b) { return b.contains(m.previous, margin_px); })) {
      continue;
    }
    const auto ground = lift(previous, m.previous);
    if (!ground || std::abs(ground->x()) > hl || std::abs(ground->y()) > hw) continue;
    kept.push_back(m);
  }
  return kept;
}

std::vector<LiftedFlowPoint> lift_flow(std::span<const FlowMatch> matches, const CameraState& previous) {
  std::vector<LiftedFlowPoint> lifted;
  lifted.reserve(matches.size());
  for (const auto& m : matches) {
    if (auto ground = lift(previous, m.previous)) lifted.push_back({*ground, m.current});
  }
  return lifted;
}

}  // namespace pitchcam
