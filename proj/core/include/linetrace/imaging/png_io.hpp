// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "linetrace/imaging/image.hpp"

namespace linetrace::imaging {

/// Reads 8-bit RGB. Gray, palette, and alpha inputs are converted to RGB.
RgbImage read_png(const std::filesystem::path& path);
void write_png(const RgbImage& img, const std::filesystem::path& path);
/// `fast` trades compression ratio for encode time.
std::vector<std::uint8_t> encode_png(const RgbImage& img, bool fast = false);

/// 0/1 mask rendered as black/white.
RgbImage mask_to_rgb(const BinaryMask& mask, int scale = 1);

}  // namespace linetrace::imaging
