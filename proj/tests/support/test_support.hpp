// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <vector>
#include <string>

#include <unistd.h>

#include "linetrace/imaging/image.hpp"
#include "linetrace/threshold/gini_tree.hpp"
#include "linetrace/util/rng.hpp"

namespace linetrace::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("linetrace_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Synthetic "color band" pixels, labelled line iff 0.12 <= h <= 0.2 and
/// v >= 0.4. Pixels come from clusters like a floor scene: tape in the band,
/// the same tape in shadow (v < 0.35), and surfaces of other hues. Exactly
/// round(noise * n) labels are then flipped.
inline threshold::LabeledPixelSet color_band_pixels(std::size_t n, double noise, std::uint64_t seed) {
  Rng rng(seed);
  // Triangular draws: cluster density peaks mid-range and thins toward the edges.
  auto tri = [&rng](double lo, double hi) { return lo + (hi - lo) * (rng.uniform() + rng.uniform()) / 2.0; };
  threshold::LabeledPixelSet set;
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = rng.uniform();
    imaging::HsvPixel px;
    if (pick < 0.4) {
      px = {tri(0.12, 0.2), tri(0.5, 1.0), tri(0.4, 1.0)};
    } else if (pick < 0.55) {
      px = {tri(0.12, 0.2), tri(0.3, 1.0), tri(0.05, 0.35)};
    } else {
      px = {tri(0.25, 0.95), rng.uniform(), rng.uniform()};
    }
    const bool line = px.h >= 0.12 && px.h <= 0.2 && px.v >= 0.4;
    set.add(px, line ? threshold::Label::Line : threshold::Label::NonLine);
  }
  const auto flips = static_cast<std::size_t>(std::lround(noise * double(n)));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t k = 0; k < flips; ++k) {
    auto& l = set.labels[order[k]];
    l = l == threshold::Label::Line ? threshold::Label::NonLine : threshold::Label::Line;
  }
  return set;
}

inline imaging::RgbImage solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  imaging::RgbImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set(x, y, {r, g, b});
  return img;
}

}  // namespace linetrace::testing
