// SPDX-License-Identifier: Apache-2.0
#include "linetrace/threshold/gini_tree.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "linetrace/error.hpp"

namespace linetrace::threshold {

std::size_t LabeledPixelSet::count(Label label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

double gini(std::size_t line_count, std::size_t nonline_count) {
  const std::size_t n = line_count + nonline_count;
  if (n == 0) throw std::invalid_argument("gini of an empty node");
  const double p = double(line_count) / double(n);
  const double q = double(nonline_count) / double(n);
  return 1.0 - (p * p + q * q);
}

double weighted_gini(std::size_t left_line, std::size_t left_nonline, std::size_t right_line,
                     std::size_t right_nonline) {
  const std::size_t nl = left_line + left_nonline;
  const std::size_t nr = right_line + right_nonline;
  const double n = double(nl + nr);
  double total = 0.0;
  if (nl > 0) total += double(nl) / n * gini(left_line, left_nonline);
  if (nr > 0) total += double(nr) / n * gini(right_line, right_nonline);
  return total;
}

std::optional<Split> best_split(const LabeledPixelSet& set) {
  if (set.pixels.size() != set.labels.size()) {
    throw std::invalid_argument("pixel and label counts differ");
  }
  const std::size_t n = set.size();
  const std::size_t total_line = set.count(Label::Line);
  if (total_line == 0 || total_line == n) return std::nullopt;

  std::optional<Split> best;
  std::vector<std::size_t> order(n);
  for (int a = 0; a < 3; ++a) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return set.pixels[i][a] < set.pixels[j][a];
    });
    std::size_t left_line = 0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (set.labels[order[k]] == Label::Line) ++left_line;
      const double lo = set.pixels[order[k]][a];
      const double hi = set.pixels[order[k + 1]][a];
      if (!(lo < hi)) continue;
      double mid = lo + (hi - lo) / 2.0;
      if (!(mid > lo)) mid = hi;
      const std::size_t left_n = k + 1;
      const double imp = weighted_gini(left_line, left_n - left_line, total_line - left_line,
                                       (n - left_n) - (total_line - left_line));
      if (!best || imp < best->impurity - kImpurityTieTolerance) {
        best = Split{static_cast<Axis>(a), mid, imp};
      }
    }
  }
  return best;
}

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("decision tree needs at least one node");
}

Label DecisionTree::classify(const imaging::HsvPixel& px) const {
  int i = 0;
  while (!nodes_[i].leaf) {
    const Node& node = nodes_[i];
    i = px[static_cast<int>(node.axis)] < node.threshold ? node.left : node.right;
  }
  return nodes_[i].label;
}

int DecisionTree::depth() const { return nodes_.empty() ? 0 : depth_from(0); }

int DecisionTree::depth_from(int index) const {
  const Node& node = nodes_[index];
  if (node.leaf) return 0;
  return 1 + std::max(depth_from(node.left), depth_from(node.right));
}

namespace {

Label majority(std::size_t line, std::size_t nonline) {
  return line > nonline ? Label::Line : Label::NonLine;
}

int grow(const LabeledPixelSet& set, int depth, int max_depth, std::vector<DecisionTree::Node>& nodes) {
  DecisionTree::Node node;
  node.line_count = set.count(Label::Line);
  node.nonline_count = set.size() - node.line_count;
  node.label = majority(node.line_count, node.nonline_count);
  const int index = static_cast<int>(nodes.size());
  nodes.push_back(node);

  if (depth >= max_depth) return index;
  const std::optional<Split> split = best_split(set);
  if (!split) return index;
  if (!(split->impurity < gini(node.line_count, node.nonline_count) - kImpurityTieTolerance)) {
    return index;
  }

  LabeledPixelSet left, right;
  const int a = static_cast<int>(split->axis);
  for (std::size_t i = 0; i < set.size(); ++i) {
    (set.pixels[i][a] < split->threshold ? left : right).add(set.pixels[i], set.labels[i]);
  }
  const int l = grow(left, depth + 1, max_depth, nodes);
  const int r = grow(right, depth + 1, max_depth, nodes);
  DecisionTree::Node& parent = nodes[index];
  parent.leaf = false;
  parent.axis = split->axis;
  parent.threshold = split->threshold;
  parent.left = l;
  parent.right = r;
  return index;
}

}  // namespace

DecisionTree fit_tree(const LabeledPixelSet& set, int max_depth) {
  if (set.size() == 0) throw std::invalid_argument("fit_tree: empty pixel set");
  if (set.pixels.size() != set.labels.size()) throw std::invalid_argument("pixel and label counts differ");
  if (max_depth < 0) throw std::invalid_argument("fit_tree: max_depth must be >= 0");
  std::vector<DecisionTree::Node> nodes;
  grow(set, 0, max_depth, nodes);
  return DecisionTree(std::move(nodes));
}

HsvThreshold to_threshold(const DecisionTree& tree, const std::string& name) {
  HsvThreshold thr{name, {}};
  Clause path;
  const auto& nodes = tree.nodes();
  std::function<void(int)> walk = [&](int i) {
    const DecisionTree::Node& node = nodes[i];
    if (node.leaf) {
      if (node.label == Label::Line) thr.clauses.push_back(path);
      return;
    }
    path.push_back({node.axis, Comparator::Lt, node.threshold});
    walk(node.left);
    path.back().cmp = Comparator::Ge;
    walk(node.right);
    path.pop_back();
  };
  walk(0);
  if (thr.clauses.empty()) {
    std::cerr << "warning: threshold '" << name << "' has no line leaf; predicate is always false\n";
  }
  return thr;
}

double evaluate(const DecisionTree& tree, const LabeledPixelSet& set) {
  if (set.size() == 0) throw std::invalid_argument("evaluate: empty pixel set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (tree.classify(set.pixels[i]) == set.labels[i]) ++correct;
  }
  return double(correct) / double(set.size());
}

LabeledPixelSet read_pixel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("pixel CSV not found: " + path.string());
  const std::string source = path.string();
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != "h,s,v,label") {
    throw ParseError(source, 1, "header", "expected 'h,s,v,label'");
  }
  LabeledPixelSet set;
  static const char* kFields[] = {"h", "s", "v", "label"};
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    double values[4];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int f = 0; f < 4; ++f) {
      auto [next, ec] = std::from_chars(p, end, values[f]);
      if (ec != std::errc{}) throw ParseError(source, line_no, kFields[f], "not a number");
      p = next;
      if (f < 3) {
        if (p == end || *p != ',') throw ParseError(source, line_no, kFields[f], "expected 4 columns");
        ++p;
      }
    }
    if (p != end) throw ParseError(source, line_no, "label", "trailing characters");
    for (int f = 0; f < 3; ++f) {
      if (!(values[f] >= 0.0 && values[f] <= 1.0)) {
        throw ParseError(source, line_no, kFields[f], "value outside [0, 1]");
      }
    }
    if (values[3] != 0.0 && values[3] != 1.0) throw ParseError(source, line_no, "label", "must be 0 or 1");
    set.add({values[0], values[1], values[2]}, values[3] == 1.0 ? Label::Line : Label::NonLine);
  }
  return set;
}

void write_pixel_csv(const LabeledPixelSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "h,s,v,label\n";
  char buf[128];
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& px = set.pixels[i];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%d\n", px.h, px.s, px.v,
                  set.labels[i] == Label::Line ? 1 : 0);
    out << buf;
  }
}

}  // namespace linetrace::threshold
