// SPDX-License-Identifier: Apache-2.0
#include "linetrace/dataset/demo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "linetrace/error.hpp"
#include "linetrace/util/rng.hpp"

namespace linetrace::dataset {

std::pair<double, double> normalize_velocity(double linear, double angular) {
  const double norm = std::hypot(linear, angular);
  if (norm == 0.0) return {0.0, 0.0};
  return {linear / norm, angular / norm};
}

bool is_unit_or_zero(double linear, double angular) {
  if (!std::isfinite(linear) || !std::isfinite(angular)) return false;
  if (linear == 0.0 && angular == 0.0) return true;
  return std::abs(std::hypot(linear, angular) - 1.0) <= kUnitNormTolerance;
}

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Oracle: return "oracle";
    case Provenance::Teleop: return "teleop";
    case Provenance::File: return "file";
  }
  return "unknown";
}

void DemoSet::validate() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DemoRecord& r = records[i];
    for (double x : r.input) {
      if (x != 0.0 && x != 1.0) throw std::invalid_argument("record " + std::to_string(i) + ": non-binary pixel");
    }
    if (!is_unit_or_zero(r.linear, r.angular)) {
      throw std::invalid_argument("record " + std::to_string(i) + ": velocity is neither unit-norm nor zero");
    }
  }
}

void DemoSet::append(const DemoSet& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
  augmented = augmented || other.augmented;
}

DemoSet mirror_augment(const DemoSet& set) {
  if (set.augmented) throw UsageError("mirror_augment: set is already augmented");
  DemoSet out;
  out.provenance = set.provenance;
  out.augmented = true;
  out.records.reserve(set.size() * 2);
  out.records = set.records;
  for (const DemoRecord& r : set.records) {
    DemoRecord m;
    m.input = imaging::mirror(r.input);
    m.linear = r.linear;
    m.angular = -r.angular;
    out.records.push_back(m);
  }
  return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec) {
  if (spec.train < 0 || spec.test < 0 || spec.val < 0 ||
      std::abs(spec.train + spec.test + spec.val - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must be non-negative and sum to 1");
  }
  // The small offset keeps 0.72 * 100 from rounding up to 73 on representation error.
  const auto up = [n](double frac) {
    return static_cast<std::size_t>(std::ceil(frac * double(n) - 1e-9));
  };
  const std::size_t train = std::min(up(spec.train), n);
  const std::size_t test = std::min(up(spec.test), n - train);
  return {train, test, n - train - test};
}

Splits split(const DemoSet& set, const SplitSpec& spec) {
  if (set.size() < 3) throw std::invalid_argument("split needs at least 3 records");
  const auto sizes = split_sizes(set.size(), spec);
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(order));

  Splits out;
  DemoSet* parts[3] = {&out.train, &out.test, &out.val};
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    parts[k]->provenance = set.provenance;
    parts[k]->augmented = set.augmented;
    parts[k]->records.reserve(sizes[k]);
    for (std::size_t i = 0; i < sizes[k]; ++i) parts[k]->records.push_back(set.records[order[pos++]]);
  }
  return out;
}

Component parse_component(const std::string& name) {
  if (name == "linear") return Component::Linear;
  if (name == "angular") return Component::Angular;
  throw std::invalid_argument("component must be 'linear' or 'angular', got '" + name + "'");
}

std::size_t Heatmap::row_total(std::size_t value_bin) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < index_bins; ++i) n += at(value_bin, i);
  return n;
}

std::size_t Heatmap::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

std::size_t value_bin(double value, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("heatmap needs at least one bin");
  const double width = 2.0 / double(bins);
  const double mag = std::min(std::abs(value), 1.0);
  const std::size_t centre = bins / 2;
  if (bins % 2 == 1) {
    const std::size_t k = std::min(static_cast<std::size_t>(std::floor(mag / width + 0.5)), centre);
    return value < 0.0 ? centre - k : centre + k;
  }
  const std::size_t k = std::min(static_cast<std::size_t>(std::floor(mag / width)), centre - 1);
  return value < 0.0 ? centre - 1 - k : centre + k;
}

Heatmap heatmap(const DemoSet& set, Component component, std::size_t bins, std::size_t index_bins) {
  if (bins == 0) throw std::invalid_argument("heatmap needs at least one bin");
  Heatmap h;
  h.value_bins = bins;
  h.index_bins = index_bins == 0 ? bins : index_bins;
  h.counts.assign(h.value_bins * h.index_bins, 0);
  const std::size_t n = set.size();
  for (std::size_t i = 0; i < n; ++i) {
    const DemoRecord& r = set.records[i];
    const double v = component == Component::Linear ? r.linear : r.angular;
    const std::size_t col = i * h.index_bins / n;
    ++h.counts[value_bin(v, bins) * h.index_bins + col];
  }
  return h;
}

}  // namespace linetrace::dataset
