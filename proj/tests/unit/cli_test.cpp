// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "linetrace/cli/commands.hpp"
#include "linetrace/dataset/demo.hpp"
#include "linetrace/error.hpp"
#include "linetrace/nn/network.hpp"
#include "linetrace/sim/episode.hpp"
#include "linetrace/threshold/gini_tree.hpp"
#include "test_support.hpp"

using namespace linetrace;
namespace fs = std::filesystem;
using linetrace::testing::read_file;
using linetrace::testing::TempDir;
using linetrace::testing::write_file;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "linetrace");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t rows(const fs::path& csv) {
  const std::string text = read_file(csv);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
}

constexpr const char* kYellow =
    R"({"name":"yellow","clauses":[[{"axis":"s","cmp":"ge","value":0.5},{"axis":"h","cmp":"lt","value":0.25}]]})";

// One small oracle dataset shared by the training and comparison tests.
class CliData : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("cli_data");
    write_file(*dir_ / "yellow.threshold.json", kYellow);
    const Result r = invoke({"collect", "--world", "preset:oval", "--frames", "70", "--rounds", "2", "--seed", "1",
                          "--out", dir_->path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static fs::path data() { return *dir_ / "demos.csv"; }
  static fs::path dir() { return dir_->path(); }

  static TempDir* dir_;
};

TempDir* CliData::dir_ = nullptr;

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"fly"}).code, 2);
  EXPECT_EQ(invoke({"train"}).code, 2);  // --data is required
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, TrainThresholdMissingFileNamesPath) {
  TempDir dir("cli_thr");
  const std::string missing = (dir / "nowhere.csv").string();
  const Result r = invoke({"train-threshold", "--pixels", missing, "--color", "yellow", "--out", dir.path().string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find(missing), std::string::npos) << r.err;
}

TEST(Cli, TrainThresholdSeparableAndNoisy) {
  TempDir dir("cli_thr");
  threshold::LabeledPixelSet sep;
  for (int i = 0; i < 200; ++i) {
    const double h = i / 200.0;
    sep.add({h, 0.8, 0.8}, h >= 0.1 && h < 0.2 ? threshold::Label::Line : threshold::Label::NonLine);
  }
  threshold::write_pixel_csv(sep, dir / "sep.csv");
  Result r = invoke({"train-threshold", "--pixels", (dir / "sep.csv").string(), "--color", "yellow", "--out",
                  dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("accuracy: 1.0000"), std::string::npos) << r.out;
  const threshold::HsvThreshold thr = threshold::load_threshold(dir / "yellow.threshold.json");
  EXPECT_EQ(thr.name, "yellow");
  EXPECT_TRUE(thr({0.15, 0.8, 0.8}));
  EXPECT_FALSE(thr({0.25, 0.8, 0.8}));

  threshold::write_pixel_csv(linetrace::testing::color_band_pixels(5000, 0.02, 8), dir / "band.csv");
  r = invoke({"train-threshold", "--pixels", (dir / "band.csv").string(), "--color", "pink", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::size_t at = r.out.find("accuracy: ");
  ASSERT_NE(at, std::string::npos);
  EXPECT_GE(std::stod(r.out.substr(at + 10)), 0.98);

  threshold::LabeledPixelSet one;
  one.add({0.1, 0.1, 0.1}, threshold::Label::Line);
  threshold::write_pixel_csv(one, dir / "one.csv");
  r = invoke({"train-threshold", "--pixels", (dir / "one.csv").string(), "--color", "red", "--out", dir.path().string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("single class"), std::string::npos);
}

TEST(Cli, CollectSixHundredFrames) {
  TempDir dir("cli_collect");
  write_file(dir / "yellow.threshold.json", kYellow);
  const Result r = invoke({"collect", "--world", "preset:oval", "--frames", "600", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(rows(dir / "demos.csv"), 600u);
  const dataset::DemoSet set = dataset::read_csv(dir / "demos.csv");
  for (const auto& rec : set.records) ASSERT_TRUE(dataset::is_unit_or_zero(rec.linear, rec.angular));
}

TEST(Cli, CollectVaryChangesMasksAtSamePoses) {
  TempDir dir("cli_vary");
  write_file(dir / "yellow.threshold.json", kYellow);
  const std::vector<std::string> base{"collect", "--world", "preset:s_curve", "--frames", "6", "--rounds", "2",
                                      "--seed", "5", "--out", dir.path().string()};
  auto plain = base, varied = base;
  plain.insert(plain.end(), {"--output", (dir / "plain.csv").string()});
  varied.insert(varied.end(), {"--vary", "--output", (dir / "vary.csv").string()});
  ASSERT_EQ(invoke(plain).code, 0);
  ASSERT_EQ(invoke(varied).code, 0);
  const dataset::DemoSet a = dataset::read_csv(dir / "plain.csv"), b = dataset::read_csv(dir / "vary.csv");
  ASSERT_EQ(a.size(), 12u);
  ASSERT_EQ(b.size(), 12u);
  // Same seed, same oracle path; only round 2's camera moves.
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(a.records[i].angular, b.records[i].angular);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(a.records[i].input, b.records[i].input);
  std::size_t differ = 0;
  for (std::size_t i = 6; i < 12; ++i) differ += a.records[i].input != b.records[i].input;
  EXPECT_GT(differ, 0u);
}

TEST(Cli, CollectNeedsThreshold) {
  TempDir dir("cli_nothr");
  const Result r = invoke({"collect", "--world", "preset:oval", "--frames", "3", "--out", dir.path().string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("yellow.threshold.json"), std::string::npos) << r.err;
}

TEST_F(CliData, TrainLogsParameterCountsAndWritesArtifacts) {
  TempDir out("cli_train");
  for (const auto& [model, count] : {std::pair<std::string, std::string>{"mlp", "409102"}, {"cnn1d", "265519"}}) {
    const Result r = invoke({"train", "--data", data().string(), "--model", model, "--epochs", "1", "--seed", "2",
                          "--out", out.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("parameters: " + count), std::string::npos) << r.err;
    for (const char* ext : {".ltnn", ".history.csv", ".loss.png", ".metrics.csv"})
      EXPECT_TRUE(fs::exists(out / (model + ext))) << model << ext;
    const nn::Network net = nn::Network::load(out / (model + ".ltnn"));
    std::ostringstream again;
    net.save(again);
    EXPECT_EQ(again.str(), read_file(out / (model + ".ltnn")));
    EXPECT_EQ(read_file(out / (model + ".history.csv")).substr(0, 26), "epoch,train_loss,val_loss\n");
  }
}

TEST_F(CliData, TrainIsByteIdenticalForFixedSeed) {
  TempDir a("cli_det"), b("cli_det");
  for (const TempDir* d : {&a, &b})
    ASSERT_EQ(invoke({"train", "--data", data().string(), "--epochs", "2", "--seed", "4", "--out", d->path().string()}).code,
              0);
  EXPECT_EQ(read_file(a / "mlp.ltnn"), read_file(b / "mlp.ltnn"));
  EXPECT_EQ(read_file(a / "mlp.history.csv"), read_file(b / "mlp.history.csv"));
  EXPECT_EQ(read_file(a / "mlp.metrics.csv"), read_file(b / "mlp.metrics.csv"));
}

TEST_F(CliData, TrainRejectsTinyDatasets) {
  TempDir dir("cli_tiny");
  dataset::DemoSet set = dataset::read_csv(data());
  set.records.resize(50);
  dataset::write_csv(set, dir / "tiny.csv");
  const Result r = invoke({"train", "--data", (dir / "tiny.csv").string(), "--out", dir.path().string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("at least 100"), std::string::npos);
}

TEST_F(CliData, CompareModelAgainstItself) {
  TempDir out("cli_cmp");
  ASSERT_EQ(invoke({"train", "--data", data().string(), "--epochs", "1", "--out", out.path().string()}).code, 0);
  write_file(out / "yellow.threshold.json", kYellow);
  const std::string model = (out / "mlp.ltnn").string();
  Result r = invoke({"simulate", "--world", "preset:oval", "--driver", "model", "--model-file", model, "--frames", "12",
                  "--out", out.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const sim::EpisodeTrace trace = sim::read_trace_csv(out / "trace.csv");
  ASSERT_FALSE(trace.frames.empty());
  ASSERT_TRUE(trace.frames[0].prediction);

  r = invoke({"compare", "--world", "preset:oval", "--model-file", model, "--reference", (out / "trace.csv").string(),
           "--lighting", "1.0", "--lighting", "0.4", "--out", out.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string table = read_file(out / "compare.csv");
  EXPECT_EQ(table.substr(0, table.find('\n')), "model,lighting,frames,mae_linear,mae_angular");
  const std::string n = std::to_string(trace.frames.size());
  EXPECT_NE(table.find("mlp,1.00," + n + ",0.000000,0.000000\n"), std::string::npos) << table;
  EXPECT_NE(table.find("mlp,0.40," + n + ","), std::string::npos) << table;
  EXPECT_NE(r.out.find("low light"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "compare.png"));

  r = invoke({"compare", "--world", "preset:oval", "--model-file", model, "--reference", (out / "trace.csv").string(),
           "--frames", "999", "--out", out.path().string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("length mismatch"), std::string::npos) << r.err;
}

TEST_F(CliData, EvalAndHeatmap) {
  TempDir out("cli_eval");
  ASSERT_EQ(invoke({"train", "--data", data().string(), "--epochs", "1", "--out", out.path().string()}).code, 0);
  Result r = invoke({"eval", "--model-file", (out / "mlp.ltnn").string(), "--data", data().string(), "--out",
                  out.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("all,140,"), std::string::npos) << r.out;

  r = invoke({"heatmap", "--data", data().string(), "--component", "both", "--bins", "11", "--out", out.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(rows(out / "heatmap_angular.csv"), 11u);
  EXPECT_TRUE(fs::exists(out / "heatmap_linear.png"));
}

TEST(Cli, SimulateOracleAndConstant) {
  TempDir out("cli_sim");
  Result r = invoke({"simulate", "--world", "preset:oval", "--frames", "600", "--stop-on-completion", "--out",
                  out.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("completed: yes"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("off_track: no"), std::string::npos);

  r = invoke({"simulate", "--world", "preset:oval", "--driver", "constant", "--linear", "1", "--angular", "0.6",
           "--output", (out / "spin.csv").string(), "--out", out.path().string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("off_track: yes"), std::string::npos);
  EXPECT_NE(r.err.find("left the track"), std::string::npos);
  EXPECT_TRUE(sim::read_trace_csv(out / "spin.csv").off_track);
}

TEST(Cli, OcclusionSweepThroughWorldFile) {
  TempDir out("cli_occ");
  sim::TrackWorld w = sim::presets::oval();
  w.occluders.push_back(sim::Occluder{w.track().at(1.0).pos, {3.0, 3.0}});
  sim::save_world(w, out / "blocked.json");
  Result r = invoke({"simulate", "--world", (out / "blocked.json").string(), "--sweep", "--frames", "5", "--out",
                  out.path().string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("hides the track"), std::string::npos) << r.err;

  r = invoke({"simulate", "--world", "preset:test_loop", "--occlude-curves", "0.4", "0.3", "--frames", "5", "--out",
           out.path().string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("sweep passed"), std::string::npos);

  r = invoke({"simulate", "--world", (out / "absent.json").string(), "--out", out.path().string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("absent.json"), std::string::npos);
}

TEST(Cli, RunConfigFile) {
  TempDir dir("cli_cfg");
  write_file(dir / "cfg.json", R"({"sim": {"v_max": 0.4}, "train": {"epochs": 7, "batch_size": 16}})");
  const cli::RunConfig cfg = cli::load_run_config(dir / "cfg.json");
  EXPECT_EQ(cfg.sim.v_max, 0.4);
  EXPECT_EQ(cfg.train.epochs, 7);
  EXPECT_EQ(cfg.train.batch_size, 16u);
  write_file(dir / "bad.json", R"({"train": {"epochs": "many"}})");
  try {
    cli::load_run_config(dir / "bad.json");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "train.epochs");
  }
  EXPECT_EQ(cli::resolve_world("preset:test_loop").color, "pink");
  EXPECT_THROW(cli::resolve_world("preset:moon"), ConfigError);
}
