// SPDX-License-Identifier: Apache-2.0
#include "linetrace/imaging/png_io.hpp"

#include <png.h>

#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "linetrace/error.hpp"

namespace linetrace::imaging {

namespace {

png_image make_rgb_header(const RgbImage& img) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  return image;
}

}  // namespace

RgbImage read_png(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw NotFoundError("PNG not found: " + path.string());
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw std::runtime_error("cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  RgbImage img(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, img.data().data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw std::runtime_error("cannot decode PNG " + path.string() + ": " + msg);
  }
  return img;
}

void write_png(const RgbImage& img, const std::filesystem::path& path) {
  png_image image = make_rgb_header(img);
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.data().data(), 0, nullptr)) {
    throw std::runtime_error("cannot write PNG " + path.string() + ": " + image.message);
  }
}

std::vector<std::uint8_t> encode_png(const RgbImage& img, bool fast) {
  png_image image = make_rgb_header(img);
  if (fast) image.flags |= PNG_IMAGE_FLAG_FAST;
  // One pass into a worst-case buffer; a size query would compress twice.
  png_alloc_size_t size = PNG_IMAGE_PNG_SIZE_MAX(image);
  std::vector<std::uint8_t> bytes(size);
  if (!png_image_write_to_memory(&image, bytes.data(), &size, 0, img.data().data(), 0, nullptr)) {
    throw std::runtime_error(std::string("PNG encode failed: ") + image.message);
  }
  bytes.resize(size);
  return bytes;
}

RgbImage mask_to_rgb(const BinaryMask& mask, int scale) {
  RgbImage out(mask.width() * scale, mask.height() * scale);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const std::uint8_t v = mask.at(x / scale, y / scale) ? 255 : 0;
      out.set(x, y, {v, v, v});
    }
  }
  return out;
}

}  // namespace linetrace::imaging
