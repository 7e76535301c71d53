// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "linetrace/imaging/image.hpp"

namespace linetrace::threshold {

enum class Axis { H = 0, S = 1, V = 2 };
enum class Comparator { Lt, Ge };

struct Conjunct {
  Axis axis = Axis::H;
  Comparator cmp = Comparator::Lt;
  double value = 0.0;

  bool holds(const imaging::HsvPixel& px) const {
    const double x = px[static_cast<int>(axis)];
    return cmp == Comparator::Lt ? x < value : x >= value;
  }
  bool operator==(const Conjunct&) const = default;
};

using Clause = std::vector<Conjunct>;

/// Per-color segmentation predicate in disjunctive normal form. A clause
/// with no conjuncts is always true; an empty clause list is always false.
struct HsvThreshold {
  std::string name;
  std::vector<Clause> clauses;

  bool operator()(const imaging::HsvPixel& px) const {
    for (const Clause& clause : clauses) {
      bool all = true;
      for (const Conjunct& c : clause) {
        if (!c.holds(px)) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
    return false;
  }

  bool operator==(const HsvThreshold&) const = default;
};

char axis_name(Axis axis);
Axis parse_axis(const std::string& token);

/// JSON document: {"name": str, "clauses": [[{"axis","cmp","value"}, ...], ...]}.
void save_threshold(const HsvThreshold& thr, const std::filesystem::path& path);
HsvThreshold load_threshold(const std::filesystem::path& path);
std::string threshold_to_json(const HsvThreshold& thr);
HsvThreshold threshold_from_json(const std::string& text, const std::string& source = "<string>");

/// `<dir>/<color>.threshold.json`.
std::filesystem::path threshold_path(const std::filesystem::path& dir, const std::string& color);

}  // namespace linetrace::threshold
