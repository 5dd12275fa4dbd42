#pragma once

#include <map>
#include <span>
#include <vector>

#include "pitchcam/field.hpp"
#include "pitchcam/geometry.hpp"

namespace pitchcam {

struct Pixel {
  int x = 0;
  int y = 0;

  auto operator<=>(const Pixel&) const = default;
};

/// Detector output for one frame: per-class pixel blobs from a segmentation
/// network, and/or per-class point lists that are used as-is.
struct SegmentationInput {
  ImageSize image;
  std::map<ElementClass, std::vector<Pixel>> pixels;
  std::map<ElementClass, std::vector<Vec2>> points;

  bool empty() const;
};

struct FlowMatch {
  Vec2 previous;
  Vec2 current;
};

/// Axis-aligned player box in pixels.
struct Box {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  bool contains(const Vec2& p, double margin = 0.0) const {
    return p.x() >= xmin - margin && p.x() <= xmax + margin && p.y() >= ymin - margin && p.y() <= ymax + margin;
  }
};

struct FrameObservations {
  int frame_index = 0;
  std::map<ElementClass, std::vector<Vec2>> marking_points;
  std::vector<FlowMatch> flow_matches;
  std::vector<Box> player_boxes;

  std::size_t marking_count() const;
};

struct LiftedFlowPoint {
  Vec3 previous_ground;  // on z = 0
  Vec2 current;
};

struct MeanShiftSettings {
  int seed_stride = 8;
  double convergence_px = 0.1;
  int max_iterations = 100;
  /// Snap each converged mode onto the local stroke centerline, removing the
  /// bias of the flat window on curved strokes.
  bool centerline_refine = true;
  /// Modes closer than this fraction of the bandwidth to the image border are
  /// dropped: a stroke clipped by the border pulls its mode inward.
  double border_margin_fraction = 0.2;
};

/// 25 px at 1080 lines, proportional to the image height.
double default_bandwidth(const ImageSize& image);

/// Flat-kernel mean-shift modes of one blob. Seeds are every
/// `seed_stride`-th pixel in row-major order; modes closer than bandwidth / 2
/// to an earlier mode are merged into it. Pixels left farther than bandwidth
/// from every mode are seeded again so the modes cover the blob.
std::vector<Vec2> mean_shift_modes(std::span<const Pixel> blob, double bandwidth,
                                   const MeanShiftSettings& settings = {});

/// Condensed points per class. Point lists in the input are passed through.
/// Modes near the image border are dropped (see border_margin_fraction).
std::map<ElementClass, std::vector<Vec2>> condense_markings(const SegmentationInput& seg, double bandwidth,
                                                            const MeanShiftSettings& settings = {});

inline constexpr double kPlayerBoxMarginPx = 8.0;

/// Keeps matches whose previous pixel lies inside the projected pitch boundary
/// and outside every player box dilated by `margin_px`. The boundary test is
/// done on the ground plane: a pixel below the horizon is inside the projected
/// boundary polygon exactly when its ground point is inside the pitch.
std::vector<FlowMatch> filter_flow(std::span<const FlowMatch> matches, const CameraState& previous,
                                   std::span<const Box> boxes, const FieldTemplate& field,
                                   double margin_px = kPlayerBoxMarginPx);

/// Ground points of the previous pixels; matches that cannot be lifted
/// (above the horizon, behind the camera, outside the lens model) are dropped.
std::vector<LiftedFlowPoint> lift_flow(std::span<const FlowMatch> matches, const CameraState& previous);

}  // namespace pitchcam
