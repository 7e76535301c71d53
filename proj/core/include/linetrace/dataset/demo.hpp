// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "linetrace/imaging/image.hpp"

namespace linetrace::dataset {

inline constexpr double kUnitNormTolerance = 1e-9;

/// Scales (linear, angular) to unit Euclidean norm; (0, 0) stays (0, 0).
std::pair<double, double> normalize_velocity(double linear, double angular);

/// True when sqrt(l^2 + a^2) is exactly 0 or within kUnitNormTolerance of 1.
bool is_unit_or_zero(double linear, double angular);

/// One preprocessed frame with its normalized velocity label.
struct DemoRecord {
  imaging::InputVector input{};
  double linear = 0.0;
  double angular = 0.0;

  bool operator==(const DemoRecord&) const = default;
};

enum class Provenance { Oracle, Teleop, File };

std::string provenance_name(Provenance p);

struct DemoSet {
  std::vector<DemoRecord> records;
  Provenance provenance = Provenance::File;
  /// Set by mirror_augment; augmenting twice is refused.
  bool augmented = false;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }

  /// Throws std::invalid_argument naming the first record that breaks the
  /// binary-input or unit-norm-or-zero invariant.
  void validate() const;

  /// Appends `other` (keeps this set's provenance).
  void append(const DemoSet& other);
};

/// Originals followed by their left-right mirrors with negated angular
/// velocity. Throws UsageError if `set` is already augmented.
DemoSet mirror_augment(const DemoSet& set);

struct SplitSpec {
  double train = 0.72;
  double test = 0.20;
  double val = 0.08;
  std::uint64_t seed = 0;
};

struct Splits {
  DemoSet train;
  DemoSet test;
  DemoSet val;
};

/// Slice sizes {train, test, val}: train and test are rounded up, val takes
/// the remainder.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec);

/// Seeded shuffle, then contiguous train / test / val slices.
Splits split(const DemoSet& set, const SplitSpec& spec);

enum class Component { Linear, Angular };

Component parse_component(const std::string& name);

/// Count grid over (velocity value, record index). Rows are value bins over
/// [-1, 1] (row 0 = most negative), columns are equal-width index buckets.
struct Heatmap {
  std::size_t value_bins = 0;
  std::size_t index_bins = 0;
  std::vector<std::size_t> counts;

  std::size_t at(std::size_t value_bin, std::size_t index_bin) const {
    return counts[value_bin * index_bins + index_bin];
  }
  std::size_t row_total(std::size_t value_bin) const;
  std::size_t total() const;
};

/// Value bin for v in [-1, 1], mirror-symmetric: value_bin(-v) = bins-1-value_bin(v)
/// for every v != 0. With an odd bin count zero sits in the centre bin.
std::size_t value_bin(double value, std::size_t bins);

Heatmap heatmap(const DemoSet& set, Component component, std::size_t bins, std::size_t index_bins = 0);

/// Header `pix_0,...,pix_1023,linear,angular`; pixels as 0/1, velocities as
/// shortest round-trip decimals; LF line endings.
void write_csv(const DemoSet& set, const std::filesystem::path& path);
std::string to_csv(const DemoSet& set);
DemoSet read_csv(const std::filesystem::path& path);
DemoSet parse_csv(const std::string& text, const std::string& source = "<string>");

}  // namespace linetrace::dataset
