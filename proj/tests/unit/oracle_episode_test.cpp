// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "linetrace/error.hpp"
#include "linetrace/models/architectures.hpp"
#include "linetrace/sim/episode.hpp"
#include "test_support.hpp"

using namespace linetrace;
using namespace linetrace::sim;
constexpr double kPi = std::numbers::pi;

namespace {

TrackWorld straight_world() { return TrackWorld("straight", {{-1.0, 0.0}, {2.0, 0.0}, {6.0, 0.0}}, false); }

TrackWorld circle_world(double r) {
  std::vector<Vec2> wps;
  for (int i = 0; i < 32; ++i) wps.push_back({r * std::cos(2 * kPi * i / 32), r * std::sin(2 * kPi * i / 32)});
  return TrackWorld("circle", std::move(wps), true);
}

EpisodeTrace fake_trace(std::size_t n, double angular_offset = 0.0) {
  EpisodeTrace t;
  for (std::size_t k = 0; k < n; ++k) {
    FrameRecord f;
    f.frame = k;
    f.t = k / 6.0;
    f.command = {0.8, 0.6 * std::sin(0.1 * k) + angular_offset};
    t.frames.push_back(f);
  }
  return t;
}

}  // namespace

TEST(Oracle, AlignedOnStraightDrivesStraight) {
  const auto cmd = oracle_drive(straight_world(), {0.5, 0.0, 0.0}, OracleParams{});
  ASSERT_TRUE(cmd);
  EXPECT_NEAR(cmd->linear, 1.0, 1e-9);
  EXPECT_NEAR(cmd->angular, 0.0, 1e-9);
}

TEST(Oracle, DisplacedLeftSteersRight) {
  const auto left = oracle_drive(straight_world(), {0.5, 0.08, 0.0}, OracleParams{});
  ASSERT_TRUE(left);
  EXPECT_LT(left->angular, 0.0);
  const auto right = oracle_drive(straight_world(), {0.5, -0.08, 0.0}, OracleParams{});
  ASSERT_TRUE(right);
  EXPECT_NEAR(right->angular, -left->angular, 1e-9);
}

TEST(Oracle, UnitNormAndOffTrack) {
  const TrackWorld w = presets::oval();
  Rng rng(4);
  for (int i = 0; i < 300; ++i) {
    const Pose p = start_pose(w, rng.uniform(0, w.track().length()), rng.uniform(-0.15, 0.15), rng.uniform(-1, 1));
    const auto cmd = oracle_drive(w, p, OracleParams{});
    ASSERT_TRUE(cmd);
    EXPECT_NEAR(std::hypot(cmd->linear, cmd->angular), 1.0, 1e-12);
  }
  EXPECT_FALSE(oracle_drive(w, start_pose(w, 1.0, 0.25), OracleParams{}));
  OracleParams wide;
  wide.capture_distance = 0.3;
  EXPECT_TRUE(oracle_drive(w, start_pose(w, 1.0, 0.25), wide));
}

TEST(Oracle, SteadyStateOnCircleMatchesCurvature) {
  const double r = 1.5;
  const TrackWorld w = circle_world(r);
  const SimConfig cfg;
  OracleDriver oracle(cfg.oracle);
  EpisodeOptions opt;
  opt.frames = 400;
  const EpisodeTrace t = run_episode(w, oracle, cfg, opt);
  ASSERT_EQ(t.frames.size(), 400u);
  double ratio = 0.0;
  int n = 0;
  for (std::size_t k = 200; k < 400; ++k) {
    const DriveCommand c = t.frames[k].command;
    ratio += (c.angular * cfg.omega_max) / (c.linear * cfg.v_max);
    ++n;
  }
  ratio /= n;
  EXPECT_NEAR(ratio, 1.0 / r, 0.1 / r);
}

TEST(Episode, OracleLapsTheOval) {
  const TrackWorld w = presets::oval();
  const SimConfig cfg;
  OracleDriver oracle(cfg.oracle);
  const EpisodeTrace t = run_episode(w, oracle, cfg, {});
  EXPECT_EQ(t.frames.size(), 600u);
  EXPECT_TRUE(t.completed);
  EXPECT_FALSE(t.off_track);
  EXPECT_GE(t.progress, w.track().length());
  EXPECT_LT(t.max_xtrack(), w.line_width);
  for (std::size_t k = 0; k < t.frames.size(); ++k) {
    EXPECT_EQ(t.frames[k].frame, k);
    EXPECT_DOUBLE_EQ(t.frames[k].t, k / 6.0);
    EXPECT_TRUE(t.frames[k].on_track);
  }
}

TEST(Episode, StopsAtEndOfOpenTrack) {
  const TrackWorld w = presets::s_curve();
  const SimConfig cfg;
  OracleDriver oracle(cfg.oracle);
  const EpisodeTrace t = run_episode(w, oracle, cfg, {});
  EXPECT_TRUE(t.completed);
  EXPECT_FALSE(t.off_track);
  EXPECT_LT(t.frames.size(), 600u);
  EXPECT_LT(t.max_xtrack(), w.line_width);
}

TEST(Episode, OffTrackFiresAtCaptureRadius) {
  const TrackWorld w = presets::oval();
  SimConfig cfg;
  CommandDriver spin({1.0, 0.6});
  const EpisodeTrace t = run_episode(w, spin, cfg, {});
  ASSERT_TRUE(t.off_track);
  EXPECT_FALSE(t.completed);
  for (std::size_t k = 0; k + 1 < t.frames.size(); ++k) {
    EXPECT_TRUE(t.frames[k].on_track);
    EXPECT_LE(t.frames[k].xtrack_err, cfg.capture_radius);
  }
  EXPECT_FALSE(t.frames.back().on_track);
  EXPECT_GT(t.frames.back().xtrack_err, cfg.capture_radius);
  const std::size_t short_run = t.frames.size();

  cfg.capture_radius = 0.4;
  CommandDriver again({1.0, 0.6});
  EXPECT_GT(run_episode(w, again, cfg, {}).frames.size(), short_run);
}

TEST(Episode, CommandDriverClampsAndMatchesKinematics) {
  const TrackWorld w = presets::oval();
  const SimConfig cfg;
  CommandDriver drv({3.0, -0.2});
  EpisodeOptions opt;
  opt.frames = 5;
  const EpisodeTrace t = run_episode(w, drv, cfg, opt);
  ASSERT_EQ(t.frames.size(), 5u);
  RobotState st{start_pose(w)};
  for (const FrameRecord& f : t.frames) {
    EXPECT_EQ(f.command, (DriveCommand{1.0, -0.2}));
    EXPECT_EQ(f.pose, st.pose);
    st = step_kinematics(st, cfg.v_max, -0.2 * cfg.omega_max, cfg.camera.frame_period());
  }
}

TEST(Episode, ExecNoiseKeepsCleanLabels) {
  const TrackWorld w = presets::oval();
  const SimConfig cfg;
  OracleDriver noisy(cfg.oracle, 0.25, 3);
  EpisodeOptions opt;
  opt.frames = 60;
  int differs = 0;
  opt.on_frame = [&](const EpisodeRunner::Step& st) {
    ASSERT_TRUE(st.decision.label);
    const auto clean = oracle_drive(w, st.record.pose, cfg.oracle);
    EXPECT_EQ(*st.decision.label, *clean);
    differs += st.decision.command.angular != clean->angular;
  };
  run_episode(w, noisy, cfg, opt);
  EXPECT_GT(differs, 50);
}

TEST(Episode, ModelDriverShapeMismatch) {
  nn::Network wrong({1, 100}, {nn::LayerSpec::dense(2)}, 1);
  EXPECT_THROW(ModelDriver(wrong, {}), ConfigError);
  nn::Network three({1, 1024}, {nn::LayerSpec::dense(3)}, 1);
  EXPECT_THROW(ModelDriver(three, {}), ConfigError);
}

TEST(Episode, ModelDriverRunsOnFrames) {
  nn::Network net = models::build_mlp(3);
  ModelDriver drv(net, {});
  const SimConfig cfg;
  EpisodeOptions opt;
  opt.frames = 3;
  const EpisodeTrace t = run_episode(presets::oval(), drv, cfg, opt);
  ASSERT_EQ(t.frames.size(), 3u);
  for (const FrameRecord& f : t.frames) {
    ASSERT_TRUE(f.prediction);
    EXPECT_EQ(f.command.linear, std::clamp(f.prediction->linear, -1.0, 1.0));
  }
}

TEST(Episode, OpenLoopReplayOfOracleIsExact) {
  const TrackWorld w = presets::oval();
  const SimConfig cfg;
  OracleDriver oracle(cfg.oracle);
  EpisodeOptions opt;
  opt.frames = 50;
  const EpisodeTrace ref = run_episode(w, oracle, cfg, opt);
  OracleDriver again(cfg.oracle);
  const EpisodeTrace replay = replay_open_loop(w, ref, again, cfg);
  const TraceComparison c = compare_traces(replay, ref);
  EXPECT_EQ(c.frames, 50u);
  EXPECT_EQ(c.mae_linear, 0.0);
  EXPECT_EQ(c.mae_angular, 0.0);
}

TEST(CompareTraces, Examples) {
  const EpisodeTrace ref = fake_trace(40);
  const TraceComparison same = compare_traces(ref, ref);
  EXPECT_EQ(same.mae_linear, 0.0);
  EXPECT_EQ(same.mae_angular, 0.0);
  const TraceComparison off = compare_traces(fake_trace(40, 0.1), ref);
  EXPECT_EQ(off.mae_linear, 0.0);
  EXPECT_NEAR(off.mae_angular, 0.1, 1e-12);
  EXPECT_THROW(compare_traces(fake_trace(39), ref), ShapeError);
  EXPECT_THROW(compare_traces(EpisodeTrace{}, EpisodeTrace{}), ShapeError);
}

TEST(TraceCsv, RoundTrip) {
  EpisodeTrace t = fake_trace(5);
  t.frames[2].prediction = DriveCommand{0.25, -0.125};
  t.frames[4].on_track = false;
  t.frames[3].xtrack_err = 0.0123;
  const std::string text = trace_to_csv(t);
  const EpisodeTrace back = parse_trace_csv(text);
  EXPECT_EQ(trace_to_csv(back), text);
  ASSERT_EQ(back.frames.size(), 5u);
  EXPECT_EQ(back.frames[2].prediction, t.frames[2].prediction);
  EXPECT_FALSE(back.frames[1].prediction);
  EXPECT_FALSE(back.frames[4].on_track);
  EXPECT_TRUE(back.off_track);

  linetrace::testing::TempDir dir("trace");
  write_trace_csv(t, dir / "t.csv");
  EXPECT_EQ(trace_to_csv(read_trace_csv(dir / "t.csv")), text);
  EXPECT_THROW(read_trace_csv(dir / "none.csv"), NotFoundError);

  try {
    parse_trace_csv(text.substr(0, text.find('\n') + 1) + "0,0,1,2,3,x,0,,,0,1\n", "t.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.field(), "v_cmd");
  }
  EXPECT_THROW(parse_trace_csv("frame,t\n"), ParseError);
}
