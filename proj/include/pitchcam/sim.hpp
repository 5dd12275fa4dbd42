#pragma once

#include <cstdint>
#include <vector>

#include "pitchcam/eval.hpp"
#include "pitchcam/field.hpp"
#include "pitchcam/observe.hpp"
#include "pitchcam/reinit.hpp"
#include "pitchcam/tripod.hpp"

namespace pitchcam {

struct Sinusoid {
  double amplitude = 0.0;
  double period_frames = 100.0;
  double phase = 0.0;  // radians
};

/// base + sum amplitude * sin(2 pi t / period + phase)
struct Profile {
  double base = 0.0;
  std::vector<Sinusoid> terms;

  double at(double t) const;
};

struct NoiseSpec {
  double marking_sigma_px = 1.0;  // per-pixel displacement of the rasterized masks
  double flow_sigma_px = 0.5;
  double flow_outlier_rate = 0.05;
  double flow_outlier_px = 40.0;  // outliers are displaced uniformly within this radius
  double keypoint_sigma_px = 0.0;
  double keypoint_outlier_rate = 0.0;
  double keypoint_outlier_px = 100.0;
};

struct DropoutWindow {
  int first = 0;
  int last = 0;  // inclusive
};

/// Angles in degrees, lambda in meters, focal in pixels.
struct TrajectorySpec {
  TripodRig rig{Vec3(0.0, 55.0, -12.0), 0.25};
  FieldDimensions field;
  ImageSize image;
  int frames = 300;
  Profile pan_deg{-14.0, {{10.0, 400.0, 0.0}}};
  Profile tilt_deg{77.0, {{2.0, 250.0, 0.5}}};
  Profile lambda_m{0.3, {{0.1, 300.0, 0.0}}};
  Profile focal_px{2000.0, {{250.0, 300.0, 1.0}}};
  double roll_deg = 0.0;
  double k1 = 0.0;
  NoiseSpec noise;
  std::vector<DropoutWindow> dropouts;
  int flow_points = 150;
  int player_boxes = 4;
  double player_motion_px = 12.0;  // apparent motion of flow inside player boxes
  double stroke_px = 0.0;          // 0: default_stroke_px of the image
  int annotation_stride = 10;      // keep every n-th loss sample in annotations
  int min_visible_classes = 3;
  std::uint64_t seed = 1;
};

/// Same trajectory with every noise source, outlier and player box removed.
TrajectorySpec zero_noise(TrajectorySpec spec);

struct SyntheticFrame {
  int frame_index = 0;
  CameraState truth;
  SegmentationInput segmentation;
  std::vector<FlowMatch> flow;
  std::vector<Box> boxes;
  std::vector<Correspondence2D3D> keypoints;
  FrameAnnotation annotation;
};

/// Camera of frame t on the rig, exactly satisfying the head model.
CameraState truth_camera(const TrajectorySpec& spec, int t);

/// Projected element polylines clipped to the image, with the border
/// crossings added so the visible extent is covered.
FrameAnnotation annotate(const CameraState& cam, const FieldTemplate& field, int stride = 10);

/// Pixels of the rasterized element, sorted row-major without duplicates.
std::vector<Pixel> rasterize_element(const CameraState& cam, const FieldTemplate& field, ElementClass c,
                                     double stroke_px);

/// Deterministic in the seed. Throws PitchOutOfView when a frame sees fewer
/// than min_visible_classes elements or looks above the horizon.
std::vector<SyntheticFrame> generate(const TrajectorySpec& spec);

}  // namespace pitchcam
