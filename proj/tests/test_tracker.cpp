#include <gtest/gtest.h>

#include "pitchcam/cli.hpp"
#include "pitchcam/eval.hpp"
#include "pitchcam/io.hpp"
#include "pitchcam/render.hpp"
#include "pitchcam/sim.hpp"
#include "pitchcam/tracker.hpp"
#include "test_util.hpp"

using namespace pitchcam;
using pitchcam::testing::expect_error;

namespace {

CameraState broadcast_camera() {
  CameraState c;
  c.pan = deg2rad(-14.0);
  c.tilt = deg2rad(77.0);
  c.focal = 2000.0;
  return c;
}

SegmentationInput as_segmentation(const std::vector<Pixel>& pixels, ElementClass c, const ImageSize& image) {
  SegmentationInput seg;
  seg.image = image;
  seg.pixels[c] = pixels;
  return seg;
}

std::vector<FrameInput> inputs_of(const std::vector<SyntheticFrame>& frames) {
  std::vector<FrameInput> out;
  for (const auto& f : frames) out.push_back(to_frame_input(f));
  return out;
}

}  // namespace

TEST(Confidence, SetArithmetic) {
  const FieldTemplate field;
  const CameraState cam = broadcast_camera();
  const double stroke = default_stroke_px(cam.image);
  const auto rendered = render_template(cam, field, stroke).pixels();
  ASSERT_FALSE(rendered.empty());

  EXPECT_DOUBLE_EQ(confidence_score(cam, as_segmentation(rendered, ElementClass::kMiddleLine, cam.image), field), 1.0);

  std::vector<Pixel> left;
  for (const Pixel& p : rendered) {
    if (p.x < cam.image.width / 2) left.push_back(p);
  }
  EXPECT_DOUBLE_EQ(confidence_score(cam, as_segmentation(left, ElementClass::kMiddleLine, cam.image), field),
                   static_cast<double>(left.size()) / rendered.size());

  // Pixels far from every marking: no overlap.
  const std::vector<Pixel> sky = {{10, 2}, {11, 2}, {12, 2}};
  const Mask mask = render_template(cam, field, stroke);
  for (const Pixel& p : sky) ASSERT_FALSE(mask.get(p.x, p.y));
  EXPECT_EQ(confidence_score(cam, as_segmentation(sky, ElementClass::kMiddleLine, cam.image), field), 0.0);

  SegmentationInput other = as_segmentation(left, ElementClass::kMiddleLine, ImageSize{960, 540});
  expect_error(ErrorCode::kInvalidArgument, [&] { confidence_score(cam, other, field); });
}

TEST(Confidence, InvariantToClassLabels) {
  TrajectorySpec spec = zero_noise(TrajectorySpec{});
  spec.frames = 1;
  const auto frames = generate(spec);
  const FieldTemplate field;
  const SegmentationInput& seg = frames[0].segmentation;
  SegmentationInput merged;
  merged.image = seg.image;
  for (const auto& [c, px] : seg.pixels) {
    auto& dst = merged.pixels[ElementClass::kCenterMark];
    dst.insert(dst.end(), px.begin(), px.end());
  }
  EXPECT_DOUBLE_EQ(confidence_score(frames[0].truth, seg, field), confidence_score(frames[0].truth, merged, field));
}

TEST(Confidence, TruthScoresHighAndPanOffsetLower) {
  TrajectorySpec spec = zero_noise(TrajectorySpec{});
  spec.frames = 3;
  const auto frames = generate(spec);
  const FieldTemplate field;
  for (const auto& f : frames) {
    const double s = confidence_score(f.truth, f.segmentation, field);
    EXPECT_GE(s, 0.9);
    CameraState off = f.truth;
    off.pan += deg2rad(2.0);
    EXPECT_LT(confidence_score(off, f.segmentation, field), s);
  }
}

TEST(Tracker, NoiselessSweepTracksEveryFrame) {
  TrajectorySpec spec = zero_noise(TrajectorySpec{});
  spec.frames = 100;
  spec.seed = 41;
  const auto frames = generate(spec);
  const FieldTemplate field;
  Tracker tracker(field, spec.rig);
  const std::vector<double> taus = {5.0};
  for (const auto& f : frames) {
    const TrackReport r = tracker.step(to_frame_input(f));
    ASSERT_TRUE(r.camera) << f.frame_index;
    EXPECT_EQ(r.status, TrackStatus::kTracking) << f.frame_index;
    EXPECT_EQ(r.reinit_used, f.frame_index == 0) << f.frame_index;
    EXPECT_LT(score_frame(r.camera, f.annotation, field, taus).mre(), 0.1) << f.frame_index;
  }
}

TEST(Tracker, EmptyFrameIsLostThenRecovered) {
  TrajectorySpec spec = zero_noise(TrajectorySpec{});
  spec.frames = 53;
  spec.seed = 42;
  spec.dropouts = {{50, 50}};
  const auto frames = generate(spec);
  const FieldTemplate field;
  Tracker tracker(field, spec.rig);
  std::vector<TrackReport> reports;
  for (const auto& f : frames) reports.push_back(tracker.step(to_frame_input(f)));
  EXPECT_EQ(reports[49].status, TrackStatus::kTracking);
  EXPECT_EQ(reports[50].status, TrackStatus::kLost);
  EXPECT_FALSE(reports[50].camera);
  EXPECT_EQ(reports[51].status, TrackStatus::kTracking);
  EXPECT_TRUE(reports[51].reinit_used);
  ASSERT_TRUE(reports[51].camera);
  EXPECT_LT(std::abs(rad2deg(reports[51].camera->pan - frames[51].truth.pan)), 0.05);
}

TEST(Tracker, FirstFrameUsesReinitialization) {
  TrajectorySpec spec = zero_noise(TrajectorySpec{});
  spec.frames = 1;
  const auto frames = generate(spec);
  const FieldTemplate field;
  Tracker tracker(field, spec.rig);
  EXPECT_EQ(tracker.state().status, TrackStatus::kUninitialized);
  const TrackReport r = tracker.step(to_frame_input(frames[0]));
  EXPECT_TRUE(r.reinit_used);
  EXPECT_EQ(r.status, TrackStatus::kTracking);
  ASSERT_TRUE(r.confidence);
  EXPECT_GE(*r.confidence, 0.9);
}

TEST(Tracker, FrameIndicesMustIncrease) {
  TrajectorySpec spec = zero_noise(TrajectorySpec{});
  spec.frames = 2;
  const auto frames = generate(spec);
  const FieldTemplate field;
  Tracker tracker(field, spec.rig);
  tracker.step(to_frame_input(frames[1]));
  expect_error(ErrorCode::kOutOfOrderFrame, [&] { tracker.step(to_frame_input(frames[0])); });
  expect_error(ErrorCode::kOutOfOrderFrame, [&] { tracker.step(to_frame_input(frames[1])); });
}

TEST(Tracker, NoKeypointsNoStartIsLost) {
  TrajectorySpec spec = zero_noise(TrajectorySpec{});
  spec.frames = 1;
  auto input = to_frame_input(generate(spec)[0]);
  input.keypoints.clear();
  const FieldTemplate field;
  Tracker tracker(field, spec.rig);
  const TrackReport r = tracker.step(input);
  EXPECT_EQ(r.status, TrackStatus::kLost);
  EXPECT_FALSE(r.camera);
}

TEST(Tracker, ReplayIsBitIdentical) {
  TrajectorySpec spec;
  spec.frames = 20;
  spec.seed = 43;
  const auto inputs = inputs_of(generate(spec));
  const FieldTemplate field;
  auto run = [&] {
    std::ostringstream os;
    write_reports(os, track_sequence(inputs, field, spec.rig, {}));
    return os.str();
  };
  EXPECT_EQ(run(), run());
}

TEST(Tracker, StatusNames) {
  for (TrackStatus s : {TrackStatus::kUninitialized, TrackStatus::kTracking, TrackStatus::kReinitializing,
                        TrackStatus::kLost}) {
    EXPECT_EQ(status_from_string(to_string(s)), s);
  }
  EXPECT_FALSE(status_from_string("lurking"));
}
