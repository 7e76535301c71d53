// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <set>

#include "linetrace/error.hpp"
#include "linetrace/threshold/gini_tree.hpp"
#include "test_support.hpp"

using namespace linetrace;
using namespace linetrace::threshold;
using imaging::HsvPixel;

namespace {

// O(n^2) scan: every midpoint of consecutive distinct values on every axis,
// impurity recounted from scratch.
std::optional<Split> brute_force_split(const LabeledPixelSet& set) {
  std::optional<Split> best;
  for (int a = 0; a < 3; ++a) {
    std::set<double> values;
    for (const HsvPixel& p : set.pixels) values.insert(p[a]);
    std::vector<double> sorted(values.begin(), values.end());
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
      const double t = sorted[k] + (sorted[k + 1] - sorted[k]) / 2.0;
      std::size_t ll = 0, ln = 0, rl = 0, rn = 0;
      for (std::size_t i = 0; i < set.size(); ++i) {
        const bool line = set.labels[i] == Label::Line;
        if (set.pixels[i][a] < t) {
          (line ? ll : ln)++;
        } else {
          (line ? rl : rn)++;
        }
      }
      const double n = double(set.size());
      auto g = [](double l, double m) {
        const double s = l + m;
        return s == 0 ? 0.0 : 1.0 - (l / s) * (l / s) - (m / s) * (m / s);
      };
      const double imp = (ll + ln) / n * g(ll, ln) + (rl + rn) / n * g(rl, rn);
      if (!best || imp < best->impurity - kImpurityTieTolerance) best = Split{Axis(a), t, imp};
    }
  }
  return best;
}

}  // namespace

TEST(Gini, Examples) {
  EXPECT_DOUBLE_EQ(gini(10, 0), 0.0);
  EXPECT_DOUBLE_EQ(gini(5, 5), 0.5);
  EXPECT_DOUBLE_EQ(gini(3, 1), 0.375);
  EXPECT_THROW(gini(0, 0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(weighted_gini(3, 1, 0, 4), 0.5 * 0.375);
}

TEST(BestSplit, PerfectlySeparable) {
  LabeledPixelSet set;
  set.add({0.1, 0.5, 0.5}, Label::Line);
  set.add({0.9, 0.5, 0.5}, Label::NonLine);
  const auto s = best_split(set);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->axis, Axis::H);
  EXPECT_DOUBLE_EQ(s->threshold, 0.5);
  EXPECT_DOUBLE_EQ(s->impurity, 0.0);
}

TEST(BestSplit, OnlyValueSeparates) {
  LabeledPixelSet set;
  Rng rng(2);
  for (int i = 0; i < 40; ++i) {
    const double h = 0.3, s = 0.6;
    const double v = rng.uniform();
    set.add({h, s, v}, v >= 0.5 ? Label::Line : Label::NonLine);
  }
  const auto s = best_split(set);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->axis, Axis::V);
  EXPECT_DOUBLE_EQ(s->impurity, 0.0);
}

TEST(BestSplit, MatchesBruteForceOnRandomSets) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    LabeledPixelSet set;
    for (int i = 0; i < 20; ++i) {
      // Coarse values force duplicates and ties.
      set.add({double(rng.below(6)) / 5.0, double(rng.below(6)) / 5.0, rng.uniform()},
              rng.uniform() < 0.5 ? Label::Line : Label::NonLine);
    }
    const auto fast = best_split(set);
    const auto slow = brute_force_split(set);
    ASSERT_EQ(fast.has_value(), slow.has_value()) << trial;
    if (!fast) continue;
    EXPECT_EQ(fast->axis, slow->axis) << trial;
    EXPECT_DOUBLE_EQ(fast->threshold, slow->threshold) << trial;
    EXPECT_NEAR(fast->impurity, slow->impurity, 1e-12) << trial;
  }
}

TEST(BestSplit, SingleClassHasNoSplit) {
  LabeledPixelSet set;
  set.add({0.1, 0.2, 0.3}, Label::Line);
  set.add({0.5, 0.2, 0.3}, Label::Line);
  EXPECT_FALSE(best_split(set));
}

TEST(FitTree, HueSeparableIsDepthOne) {
  LabeledPixelSet set;
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double h = rng.uniform();
    set.add({h, rng.uniform(), rng.uniform()}, h < 0.3 ? Label::Line : Label::NonLine);
  }
  const DecisionTree tree = fit_tree(set);
  EXPECT_EQ(tree.depth(), 1);
  EXPECT_DOUBLE_EQ(evaluate(tree, set), 1.0);
}

TEST(FitTree, NoisyColorBand) {
  const LabeledPixelSet set = linetrace::testing::color_band_pixels(5000, 0.02, 8);
  const DecisionTree tree = fit_tree(set, 2);
  EXPECT_LE(tree.depth(), 2);
  EXPECT_GE(evaluate(tree, set), 0.98);
  EXPECT_LE(fit_tree(set, 1).depth(), 1);
  EXPECT_THROW(fit_tree(LabeledPixelSet{}), std::invalid_argument);
}

TEST(Evaluate, AllCorrectAndAllWrong) {
  LabeledPixelSet set;
  set.add({0.1, 0, 0}, Label::Line);
  set.add({0.9, 0, 0}, Label::NonLine);
  const DecisionTree tree = fit_tree(set);
  EXPECT_DOUBLE_EQ(evaluate(tree, set), 1.0);
  LabeledPixelSet flipped;
  flipped.add({0.1, 0, 0}, Label::NonLine);
  flipped.add({0.9, 0, 0}, Label::Line);
  EXPECT_DOUBLE_EQ(evaluate(tree, flipped), 0.0);
}

TEST(ToThreshold, DepthOneTree) {
  DecisionTree::Node root;
  root.leaf = false;
  root.axis = Axis::H;
  root.threshold = 0.5;
  root.left = 1;
  root.right = 2;
  DecisionTree::Node line;
  line.label = Label::Line;
  DecisionTree::Node other;
  const HsvThreshold thr = to_threshold(DecisionTree({root, line, other}), "x");
  ASSERT_EQ(thr.clauses.size(), 1u);
  EXPECT_EQ(thr.clauses[0], (Clause{{Axis::H, Comparator::Lt, 0.5}}));
}

TEST(ToThreshold, HueThenValueChains) {
  // Root splits hue; the low-hue branch splits value; the high-hue branch
  // splits saturation. Line leaves at (h < .2, v >= .4) and (h >= .2, s < .3).
  std::vector<DecisionTree::Node> n(7);
  n[0] = {false, Axis::H, 0.2, 1, 4};
  n[1] = {false, Axis::V, 0.4, 2, 3};
  n[2].label = Label::NonLine;
  n[3].label = Label::Line;
  n[4] = {false, Axis::S, 0.3, 5, 6};
  n[5].label = Label::Line;
  n[6].label = Label::NonLine;
  const HsvThreshold thr = to_threshold(DecisionTree(n), "fig");
  ASSERT_EQ(thr.clauses.size(), 2u);
  EXPECT_EQ(thr.clauses[0], (Clause{{Axis::H, Comparator::Lt, 0.2}, {Axis::V, Comparator::Ge, 0.4}}));
  EXPECT_EQ(thr.clauses[1], (Clause{{Axis::H, Comparator::Ge, 0.2}, {Axis::S, Comparator::Lt, 0.3}}));
}

TEST(ToThreshold, AgreesWithTreeOnRandomPixels) {
  const DecisionTree tree = fit_tree(linetrace::testing::color_band_pixels(3000, 0.02, 21), 2);
  const HsvThreshold thr = to_threshold(tree, "yellow");
  Rng rng(77);
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const HsvPixel p{rng.uniform(), rng.uniform(), rng.uniform()};
    mismatches += thr(p) != (tree.classify(p) == Label::Line);
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(ThresholdJson, RoundTripAndErrors) {
  const HsvThreshold thr{"pink",
                         {{{Axis::S, Comparator::Ge, 0.4}, {Axis::H, Comparator::Lt, 0.123456789012345}}}};
  EXPECT_EQ(threshold_from_json(threshold_to_json(thr)), thr);

  linetrace::testing::TempDir dir("thr");
  save_threshold(thr, threshold_path(dir.path(), "pink"));
  EXPECT_EQ(load_threshold(dir / "pink.threshold.json"), thr);
  EXPECT_THROW(load_threshold(dir / "nope.threshold.json"), NotFoundError);

  EXPECT_THROW(threshold_from_json("{"), ParseError);
  EXPECT_THROW(threshold_from_json("[]"), ParseError);
  try {
    threshold_from_json(R"({"name":"x","clauses":[[{"axis":"q","cmp":"lt","value":1}]]})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "clauses[0][0].axis");
  }
  EXPECT_THROW(threshold_from_json(R"({"name":"x","clauses":[[{"axis":"h","cmp":"le","value":1}]]})"),
               ParseError);
}

TEST(PixelCsv, RoundTrip) {
  linetrace::testing::TempDir dir("pix");
  const LabeledPixelSet set = linetrace::testing::color_band_pixels(50, 0.0, 1);
  write_pixel_csv(set, dir / "p.csv");
  const LabeledPixelSet back = read_pixel_csv(dir / "p.csv");
  ASSERT_EQ(back.size(), set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    EXPECT_EQ(back.pixels[i], set.pixels[i]);
    EXPECT_EQ(back.labels[i], set.labels[i]);
  }
  linetrace::testing::write_file(dir / "bad.csv", "h,s,v,label\n0.1,0.2,x,1\n");
  try {
    read_pixel_csv(dir / "bad.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.field(), "v");
  }
}
