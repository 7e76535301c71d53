// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "linetrace/sim/collect.hpp"
#include "linetrace/sim/survey.hpp"

using namespace linetrace;
using namespace linetrace::sim;

namespace {

threshold::HsvThreshold yellow() {
  using threshold::Axis;
  using threshold::Comparator;
  return {"yellow", {{{Axis::S, Comparator::Ge, 0.5}, {Axis::H, Comparator::Lt, 0.25}}}};
}

}  // namespace

TEST(Collect, OneRecordPerFrameWithUnitLabels) {
  CollectOptions opt;
  opt.rounds = 2;
  opt.frames = 40;
  opt.seed = 3;
  const Collection c = collect_demos(presets::oval(), SimConfig{}, yellow(), opt);
  ASSERT_EQ(c.rounds.size(), 2u);
  EXPECT_EQ(c.demos.size(), 80u);
  EXPECT_EQ(c.demos.provenance, dataset::Provenance::Oracle);
  EXPECT_NO_THROW(c.demos.validate());
  std::size_t lit = 0;
  for (const auto& r : c.demos.records) {
    EXPECT_TRUE(dataset::is_unit_or_zero(r.linear, r.angular));
    for (double v : r.input) lit += v == 1.0;
  }
  EXPECT_GT(lit, 80u * 32);  // the line shows up in every frame
  for (const RoundReport& r : c.rounds) EXPECT_FALSE(r.off_track);
}

TEST(Collect, SeededAndVaried) {
  CollectOptions opt;
  opt.rounds = 2;
  opt.frames = 10;
  opt.seed = 4;
  const TrackWorld w = presets::s_curve();
  const Collection a = collect_demos(w, SimConfig{}, yellow(), opt);
  const Collection b = collect_demos(w, SimConfig{}, yellow(), opt);
  EXPECT_EQ(a.demos.records, b.demos.records);

  opt.vary = true;
  const Collection v = collect_demos(w, SimConfig{}, yellow(), opt);
  // round 0 keeps the base camera, later rounds move the footprint
  EXPECT_EQ(v.rounds[0].camera.pitch, SimConfig{}.camera.pitch);
  EXPECT_NE(v.rounds[1].camera.pitch, SimConfig{}.camera.pitch);
  std::size_t differ = 0;
  for (std::size_t i = 10; i < 20; ++i) differ += v.demos.records[i].input != a.demos.records[i].input;
  EXPECT_GT(differ, 0u);
}

TEST(Collect, JitteredCameraStaysValid) {
  const CameraModel base = CameraModel::standard();
  for (int r = 1; r < 20; ++r) {
    const CameraModel m = jitter_camera(base, 9, r);
    EXPECT_NO_THROW(m.validate());
    const CameraRig rig(m);
    EXPECT_NEAR(rig.ground_offset(320, 479).x, 0.3, 0.031);
    EXPECT_NEAR(rig.ground_offset(320, 0).x, 1.0, 0.11);
  }
  EXPECT_EQ(jitter_camera(base, 9, 3).pitch, jitter_camera(base, 9, 3).pitch);
}

TEST(Survey, LabelsFollowGroundTruth) {
  SurveyOptions opt;
  opt.images = 4;
  opt.pixels_per_image = 500;
  opt.seed = 2;
  const TrackWorld w = presets::oval();
  const threshold::LabeledPixelSet set = survey_pixels(w, SimConfig{}, opt);
  ASSERT_EQ(set.size(), 2000u);
  std::size_t positives = 0, agree = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const bool line = set.labels[i] == threshold::Label::Line;
    positives += line;
    agree += yellow()(set.pixels[i]) == line;
  }
  EXPECT_GT(positives, 100u);
  EXPECT_LT(positives, 1900u);
  EXPECT_GT(static_cast<double>(agree) / set.size(), 0.95);
  EXPECT_EQ(survey_pixels(w, SimConfig{}, opt).pixels, set.pixels);
}
