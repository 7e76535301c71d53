// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace linetrace::imaging {

inline constexpr int kGridSize = 32;
inline constexpr std::size_t kInputSize = kGridSize * kGridSize;

/// 8-bit RGB, row-major, three bytes per pixel.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height);
  RgbImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  std::uint8_t& at(int x, int y, int c) { return data_[index(x, y) + c]; }
  std::uint8_t at(int x, int y, int c) const { return data_[index(x, y) + c]; }
  void set(int x, int y, std::array<std::uint8_t, 3> rgb);

  std::vector<std::uint8_t>& data() noexcept { return data_; }
  const std::vector<std::uint8_t>& data() const noexcept { return data_; }

  bool operator==(const RgbImage&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// h, s, v each in [0, 1]; hue is cyclic.
struct HsvPixel {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;

  double operator[](int axis) const { return axis == 0 ? h : (axis == 1 ? s : v); }
  bool operator==(const HsvPixel&) const = default;
};

class HsvImage {
 public:
  HsvImage() = default;
  HsvImage(int width, int height) : width_(width), height_(height), data_(std::size_t(width) * height) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  HsvPixel& at(int x, int y) { return data_[std::size_t(y) * width_ + x]; }
  const HsvPixel& at(int x, int y) const { return data_[std::size_t(y) * width_ + x]; }

  const std::vector<HsvPixel>& data() const noexcept { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<HsvPixel> data_;
};

/// Row-major mask with every element exactly 0 or 1.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, std::uint8_t fill = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::uint8_t at(int x, int y) const { return data_[std::size_t(y) * width_ + x]; }
  void set(int x, int y, bool on) { data_[std::size_t(y) * width_ + x] = on ? 1 : 0; }

  const std::vector<std::uint8_t>& data() const noexcept { return data_; }
  std::size_t count() const;

  bool operator==(const BinaryMask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Network input: a flattened 32x32 mask, index = 32 * row + col.
using InputVector = std::array<double, kInputSize>;

RgbImage mirror(const RgbImage& img);
BinaryMask mirror(const BinaryMask& mask);
/// Left-right flip of a flattened 32x32 grid: 32r + c <-> 32r + (31 - c).
InputVector mirror(const InputVector& input);

InputVector flatten(const BinaryMask& mask32);
BinaryMask unflatten(const InputVector& input);

}  // namespace linetrace::imaging
