// SPDX-License-Identifier: Apache-2.0
#include "linetrace/imaging/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "linetrace/error.hpp"

namespace linetrace::imaging {

std::vector<double> gaussian_kernel(int kernel_size, double sigma) {
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw std::invalid_argument("blur kernel size must be odd and >= 1, got " +
                                std::to_string(kernel_size));
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("blur sigma must be > 0");
  const int radius = kernel_size / 2;
  std::vector<double> w(kernel_size);
  double sum = 0.0;
  for (int i = 0; i < kernel_size; ++i) {
    const double d = i - radius;
    w[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return w;
}

RgbImage gaussian_blur(const RgbImage& img, int kernel_size, double sigma) {
  const std::vector<double> w = gaussian_kernel(kernel_size, sigma);
  const int radius = kernel_size / 2;
  const int width = img.width();
  const int height = img.height();
  const auto clamp_x = [width](int x) { return std::clamp(x, 0, width - 1); };
  const auto clamp_y = [height](int y) { return std::clamp(y, 0, height - 1); };

  // Taps are paired (p[x-k] + p[x+k]) so the sum is identical for a mirrored
  // image, which keeps the pipeline exactly mirror-equivariant.
  std::vector<double> horiz(std::size_t(width) * height * 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = w[radius] * img.at(x, y, c);
        for (int k = 1; k <= radius; ++k) {
          acc += w[radius + k] * (double(img.at(clamp_x(x - k), y, c)) + img.at(clamp_x(x + k), y, c));
        }
        horiz[(std::size_t(y) * width + x) * 3 + c] = acc;
      }
    }
  }

  RgbImage out(width, height);
  const auto h_at = [&](int x, int y, int c) { return horiz[(std::size_t(y) * width + x) * 3 + c]; };
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = w[radius] * h_at(x, y, c);
        for (int k = 1; k <= radius; ++k) {
          acc += w[radius + k] * (h_at(x, clamp_y(y - k), c) + h_at(x, clamp_y(y + k), c));
        }
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
      }
    }
  }
  return out;
}

HsvPixel rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  const double delta = mx - mn;
  HsvPixel px;
  px.v = mx / 255.0;
  px.s = mx == 0 ? 0.0 : delta / mx;
  if (delta == 0.0) {
    px.h = 0.0;
    return px;
  }
  double sector;
  if (mx == r) {
    sector = (double(g) - b) / delta;
    if (sector < 0.0) sector += 6.0;
  } else if (mx == g) {
    sector = (double(b) - r) / delta + 2.0;
  } else {
    sector = (double(r) - g) / delta + 4.0;
  }
  px.h = sector / 6.0;
  if (px.h >= 1.0) px.h -= 1.0;
  return px;
}

HsvImage rgb_to_hsv(const RgbImage& img) {
  HsvImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) = rgb_to_hsv(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
    }
  }
  return out;
}

BinaryMask apply_threshold(const HsvImage& img, const threshold::HsvThreshold& thr) {
  BinaryMask out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(x, y, thr(img.at(x, y)));
  }
  return out;
}

BinaryMask downsample_32(const BinaryMask& mask) {
  const std::int64_t width = mask.width();
  const std::int64_t height = mask.height();
  if (width < kGridSize || height < kGridSize) {
    throw ShapeError("downsample_32 needs at least 32x32, got " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
  // Work in coordinates scaled by 32: source pixel x spans [32x, 32x + 32),
  // output cell j spans [j * width, (j + 1) * width).
  const auto overlap = [](std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) {
    return std::max<std::int64_t>(0, std::min(a1, b1) - std::max(a0, b0));
  };
  BinaryMask out(kGridSize, kGridSize);
  const std::int64_t cell_area = width * height;
  for (int row = 0; row < kGridSize; ++row) {
    const std::int64_t cy0 = row * height, cy1 = (row + 1) * height;
    const std::int64_t y_first = cy0 / kGridSize, y_last = (cy1 - 1) / kGridSize;
    for (int col = 0; col < kGridSize; ++col) {
      const std::int64_t cx0 = col * width, cx1 = (col + 1) * width;
      const std::int64_t x_first = cx0 / kGridSize, x_last = (cx1 - 1) / kGridSize;
      std::int64_t covered = 0;
      for (std::int64_t y = y_first; y <= y_last; ++y) {
        const std::int64_t oy = overlap(cy0, cy1, y * kGridSize, (y + 1) * kGridSize);
        std::int64_t row_sum = 0;
        for (std::int64_t x = x_first; x <= x_last; ++x) {
          if (mask.at(int(x), int(y))) row_sum += overlap(cx0, cx1, x * kGridSize, (x + 1) * kGridSize);
        }
        covered += oy * row_sum;
      }
      out.set(col, row, 2 * covered >= cell_area);
    }
  }
  return out;
}

BinaryMask segment(const RgbImage& raw, const threshold::HsvThreshold& thr, const BlurConfig& blur) {
  return apply_threshold(rgb_to_hsv(gaussian_blur(raw, blur.kernel_size, blur.sigma)), thr);
}

InputVector preprocess(const RgbImage& raw, const threshold::HsvThreshold& thr, const BlurConfig& blur) {
  if (raw.width() < kGridSize || raw.height() < kGridSize) {
    throw ShapeError("preprocess needs a frame of at least 32x32");
  }
  return flatten(downsample_32(segment(raw, thr, blur)));
}

}  // namespace linetrace::imaging
