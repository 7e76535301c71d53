// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "linetrace/imaging/image.hpp"
#include "linetrace/threshold/threshold.hpp"

namespace linetrace::imaging {

struct BlurConfig {
  int kernel_size = 5;
  double sigma = 1.0;
};

/// Normalized 1-D Gaussian weights, centre at index kernel_size / 2.
std::vector<double> gaussian_kernel(int kernel_size, double sigma);

/// Separable Gaussian blur per channel with edge replication. Output values
/// are rounded to the nearest integer. Throws std::invalid_argument for an
/// even or non-positive kernel size, or sigma <= 0.
RgbImage gaussian_blur(const RgbImage& img, int kernel_size, double sigma);

/// Hexcone conversion with all three components scaled to [0, 1]. Achromatic
/// pixels get hue 0.
HsvPixel rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);
HsvImage rgb_to_hsv(const RgbImage& img);

BinaryMask apply_threshold(const HsvImage& img, const threshold::HsvThreshold& thr);

/// Area-average resample to 32x32, then cell = 1 iff the covered mean is
/// >= 0.5. Coverage is computed in exact integer arithmetic. Throws
/// ShapeError when the input is smaller than 32x32.
BinaryMask downsample_32(const BinaryMask& mask);

/// blur -> HSV -> threshold -> downsample -> row-major flatten.
InputVector preprocess(const RgbImage& raw, const threshold::HsvThreshold& thr,
                       const BlurConfig& blur = {});

/// Same pipeline, stopping after the threshold stage (full-resolution mask).
BinaryMask segment(const RgbImage& raw, const threshold::HsvThreshold& thr,
                   const BlurConfig& blur = {});

}  // namespace linetrace::imaging
