// SPDX-License-Identifier: Apache-2.0
#include "linetrace/imaging/image.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "linetrace/error.hpp"

namespace linetrace::imaging {

namespace {
void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw ShapeError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
}
}  // namespace

RgbImage::RgbImage(int width, int height)
    : width_(width), height_(height), data_(std::size_t(std::max(width, 0)) * std::max(height, 0) * 3) {
  check_dims(width, height);
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != std::size_t(width) * height * 3) {
    throw ShapeError("RGB buffer holds " + std::to_string(data_.size()) + " bytes, expected " +
                     std::to_string(std::size_t(width) * height * 3));
  }
}

void RgbImage::set(int x, int y, std::array<std::uint8_t, 3> rgb) {
  const std::size_t i = index(x, y);
  data_[i] = rgb[0];
  data_[i + 1] = rgb[1];
  data_[i + 2] = rgb[2];
}

BinaryMask::BinaryMask(int width, int height, std::uint8_t fill)
    : width_(width), height_(height), data_(std::size_t(std::max(width, 0)) * std::max(height, 0), fill ? 1 : 0) {
  check_dims(width, height);
}

std::size_t BinaryMask::count() const {
  return std::accumulate(data_.begin(), data_.end(), std::size_t{0});
}

RgbImage mirror(const RgbImage& img) {
  RgbImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const int mx = img.width() - 1 - x;
      for (int c = 0; c < 3; ++c) out.at(mx, y, c) = img.at(x, y, c);
    }
  }
  return out;
}

BinaryMask mirror(const BinaryMask& mask) {
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) out.set(mask.width() - 1 - x, y, mask.at(x, y));
  }
  return out;
}

InputVector mirror(const InputVector& input) {
  InputVector out{};
  for (int r = 0; r < kGridSize; ++r) {
    for (int c = 0; c < kGridSize; ++c) {
      out[r * kGridSize + (kGridSize - 1 - c)] = input[r * kGridSize + c];
    }
  }
  return out;
}

InputVector flatten(const BinaryMask& mask32) {
  if (mask32.width() != kGridSize || mask32.height() != kGridSize) {
    throw ShapeError("flatten expects a 32x32 mask, got " + std::to_string(mask32.width()) + "x" +
                     std::to_string(mask32.height()));
  }
  InputVector out{};
  for (std::size_t i = 0; i < kInputSize; ++i) out[i] = mask32.data()[i] ? 1.0 : 0.0;
  return out;
}

BinaryMask unflatten(const InputVector& input) {
  BinaryMask out(kGridSize, kGridSize);
  for (int r = 0; r < kGridSize; ++r) {
    for (int c = 0; c < kGridSize; ++c) out.set(c, r, input[r * kGridSize + c] != 0.0);
  }
  return out;
}

}  // namespace linetrace::imaging
