#include <gtest/gtest.h>

#include <sstream>

#include "pitchcam/config.hpp"
#include "pitchcam/io.hpp"
#include "pitchcam/sim.hpp"
#include "test_util.hpp"

using namespace pitchcam;
using pitchcam::testing::expect_error;

namespace {

const std::vector<SyntheticFrame>& frames() {
  static const std::vector<SyntheticFrame> f = [] {
    TrajectorySpec spec;
    spec.frames = 3;
    spec.seed = 71;
    spec.noise.keypoint_sigma_px = 0.7;
    return generate(spec);
  }();
  return f;
}

void expect_parse_error_on_line(const std::string& text, int line) {
  std::istringstream in(text);
  try {
    read_annotations(in);
    ADD_FAILURE() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line " + std::to_string(line)), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Detections, RoundTrip) {
  std::vector<FrameInput> in;
  for (const auto& f : frames()) in.push_back(to_frame_input(f));
  in[1].segmentation.points[ElementClass::kCenterMark] = {Vec2(960.25, 540.5)};
  std::stringstream ss;
  write_detections(ss, in);
  const auto out = read_detections(ss, FieldDimensions{});
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_EQ(detection_to_json(out[i]).dump(), detection_to_json(in[i]).dump());
    ASSERT_EQ(out[i].keypoints.size(), in[i].keypoints.size());
    for (std::size_t k = 0; k < in[i].keypoints.size(); ++k) {
      EXPECT_EQ(out[i].keypoints[k].world, in[i].keypoints[k].world);
    }
    EXPECT_EQ(out[i].flow.size(), in[i].flow.size());
    EXPECT_EQ(out[i].boxes.size(), in[i].boxes.size());
  }
}

TEST(Detections, AliasesAndUnknownNames) {
  const Json j = Json::parse(R"({"frame": 0, "image": [64, 32],
    "markings": {"halfway line": {"rle": [[3, 10, 4]]}},
    "keypoints": [{"name": "custom", "xy": [1, 2], "world": [0, 0, 0]}]})");
  const FrameInput f = detection_from_json(j, FieldDimensions{}, {{"halfway line", "Middle line"}});
  ASSERT_EQ(f.segmentation.pixels.count(ElementClass::kMiddleLine), 1u);
  EXPECT_EQ(f.segmentation.pixels.at(ElementClass::kMiddleLine).size(), 4u);
  EXPECT_EQ(f.segmentation.pixels.at(ElementClass::kMiddleLine)[3], (Pixel{13, 3}));
  expect_error(ErrorCode::kParse, [&] { detection_from_json(j, FieldDimensions{}); });

  Json bad_kp = Json::parse(R"({"frame": 0, "image": [64, 32], "keypoints": [{"name": "nowhere", "xy": [1, 2]}]})");
  expect_error(ErrorCode::kParse, [&] { detection_from_json(bad_kp, FieldDimensions{}); });
  Json extra = Json::parse(R"({"frame": 0, "image": [64, 32], "colour": 1})");
  expect_error(ErrorCode::kParse, [&] { detection_from_json(extra, FieldDimensions{}); });
}

TEST(Reports, RoundTrip) {
  TrackReport a;
  a.frame_index = 4;
  a.camera = frames()[0].truth;
  a.camera->k1 = -0.03;
  a.confidence = 0.87;
  a.status = TrackStatus::kReinitializing;
  a.cost = 12.5;
  a.mre = 0.75;
  a.reinit_used = true;
  TrackReport b;
  b.frame_index = 5;
  b.status = TrackStatus::kLost;
  std::stringstream ss;
  write_reports(ss, {a, b});
  const auto out = read_reports(ss);
  ASSERT_EQ(out.size(), 2u);
  ASSERT_TRUE(out[0].camera);
  const auto pa = a.camera->parameters(), pb = out[0].camera->parameters();
  for (int k = 0; k < kNumCameraParams; ++k) EXPECT_NEAR(pb[k], pa[k], 1e-12 * std::max(1.0, std::abs(pa[k])));
  EXPECT_EQ(out[0].camera->image.width, 1920);
  EXPECT_EQ(out[0].confidence, a.confidence);
  EXPECT_EQ(out[0].status, a.status);
  EXPECT_EQ(out[0].cost, a.cost);
  EXPECT_EQ(out[0].mre, a.mre);
  EXPECT_TRUE(out[0].reinit_used);
  EXPECT_FALSE(out[1].camera);
  EXPECT_FALSE(out[1].confidence);
  EXPECT_EQ(out[1].status, TrackStatus::kLost);

  Json bad = report_to_json(a);
  bad["status"] = "wandering";
  expect_error(ErrorCode::kParse, [&] { report_from_json(bad); });
}

TEST(Annotations, RoundTrip) {
  std::vector<AnnotatedFrame> in;
  for (const auto& f : frames()) in.push_back({f.frame_index, f.truth.image, f.annotation});
  std::stringstream ss;
  write_annotations(ss, in);
  const auto out = read_annotations(ss);
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_EQ(out[i].frame_index, in[i].frame_index);
    EXPECT_EQ(out[i].annotation, in[i].annotation);
  }
}

TEST(Annotations, ParseErrorsCarryLineNumbers) {
  expect_parse_error_on_line("{\"frame\": 0, \"image\": [4, 4], \"classes\": {}}\n\n{not json\n", 3);
  expect_parse_error_on_line("{\"frame\": 0, \"image\": [4, 4], \"classes\": {\"Nope\": [[1, 2]]}}\n", 1);
}

TEST(Rig, RoundTripAndUnknownKeys) {
  const TripodRig rig{Vec3(1.25, 54.5, -12.75), 0.3};
  const TripodRig back = rig_from_json(rig_to_json(rig));
  EXPECT_EQ(back.center, rig.center);
  EXPECT_EQ(back.offset, rig.offset);
  Json j = rig_to_json(rig);
  j["lambda"] = 1.0;
  expect_error(ErrorCode::kParse, [&] { rig_from_json(j); });
}

TEST(Trajectory, RoundTripDefaultsAndUnknownKeys) {
  TrajectorySpec spec;
  spec.frames = 42;
  spec.k1 = -0.02;
  spec.dropouts = {{5, 9}};
  spec.pan_deg.terms.push_back({1.5, 33.0, 0.25});
  const Json j = trajectory_to_json(spec);
  EXPECT_EQ(trajectory_to_json(trajectory_from_json(j)).dump(), j.dump());

  const TrajectorySpec partial = trajectory_from_json(Json::parse(R"({"frames": 7, "seed": 3})"));
  EXPECT_EQ(partial.frames, 7);
  EXPECT_EQ(partial.seed, 3u);
  EXPECT_EQ(partial.focal_px.base, TrajectorySpec{}.focal_px.base);

  expect_error(ErrorCode::kParse, [&] { trajectory_from_json(Json::parse(R"({"frmaes": 7})")); });
}

TEST(Config, RoundTripAndUnknownKeys) {
  RunConfig c;
  c.camera_role = "16m_left";
  c.rig_offset_m = 0.2;
  c.tracker.reinit_threshold = 0.45;
  c.tracker.solver.omega = 250.0;
  c.aliases["halfway line"] = "Middle line";
  const Json j = config_to_json(c);
  const RunConfig back = config_from_json(j);
  EXPECT_EQ(config_to_json(back).dump(), j.dump());
  EXPECT_EQ(back.default_rig().center, Vec3(-36.0, 55.0, -12.0));
  EXPECT_EQ(back.default_rig().offset, 0.2);

  Json bad = j;
  bad["tracker"]["reinit_treshold"] = 0.4;
  expect_error(ErrorCode::kParse, [&] { config_from_json(bad); });

  RunConfig unknown_role;
  unknown_role.camera_role = "blimp";
  expect_error(ErrorCode::kInvalidArgument, [&] { unknown_role.default_rig(); });
}
