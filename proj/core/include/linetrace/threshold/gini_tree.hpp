// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "linetrace/imaging/image.hpp"
#include "linetrace/threshold/threshold.hpp"

namespace linetrace::threshold {

enum class Label : unsigned char { NonLine = 0, Line = 1 };

struct LabeledPixelSet {
  std::vector<imaging::HsvPixel> pixels;
  std::vector<Label> labels;

  std::size_t size() const noexcept { return pixels.size(); }
  void add(const imaging::HsvPixel& px, Label label) {
    pixels.push_back(px);
    labels.push_back(label);
  }
  std::size_t count(Label label) const;
};

/// Gini impurity of a two-class node: 1 - sum(p_i^2).
double gini(std::size_t line_count, std::size_t nonline_count);

/// Weighted child impurity of a binary split, normalized by the parent size.
double weighted_gini(std::size_t left_line, std::size_t left_nonline, std::size_t right_line,
                     std::size_t right_nonline);

/// Candidate impurities closer than this are treated as tied.
inline constexpr double kImpurityTieTolerance = 1e-12;

/// Split "value < threshold" goes left, "value >= threshold" goes right.
struct Split {
  Axis axis = Axis::H;
  double threshold = 0.0;
  double impurity = 0.0;
};

/// Exhaustive CART split search over midpoints of consecutive distinct values
/// on h, s, v. Ties go to the earlier axis, then the smaller threshold.
/// Returns nullopt (no split) when the set holds a single class or no axis has
/// two distinct values.
std::optional<Split> best_split(const LabeledPixelSet& set);

class DecisionTree {
 public:
  struct Node {
    bool leaf = true;
    Axis axis = Axis::H;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Label label = Label::NonLine;
    std::size_t line_count = 0;
    std::size_t nonline_count = 0;
  };

  DecisionTree() = default;
  explicit DecisionTree(std::vector<Node> nodes);

  Label classify(const imaging::HsvPixel& px) const;
  int depth() const;
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& root() const { return nodes_.front(); }

 private:
  int depth_from(int index) const;

  std::vector<Node> nodes_;
};

/// Recursive CART with Gini impurity. Stops at max_depth, at pure nodes, or
/// when no split strictly reduces impurity. Leaf ties predict non-line.
DecisionTree fit_tree(const LabeledPixelSet& set, int max_depth = 2);

/// Union of root-to-leaf paths ending in a line leaf. A tree with no line
/// leaf yields an always-false predicate and a warning on stderr.
HsvThreshold to_threshold(const DecisionTree& tree, const std::string& name);

/// Fraction of pixels the tree labels correctly.
double evaluate(const DecisionTree& tree, const LabeledPixelSet& set);

/// CSV with header `h,s,v,label` (label 1 = line, 0 = non-line).
LabeledPixelSet read_pixel_csv(const std::filesystem::path& path);
void write_pixel_csv(const LabeledPixelSet& set, const std::filesystem::path& path);

}  // namespace linetrace::threshold
