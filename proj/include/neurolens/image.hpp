#pragma once

#include "neurolens/util.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>

namespace neurolens {

using Rgb = std::array<std::uint8_t, 3>;

// 8-bit interleaved RGB raster.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(std::size_t w, std::size_t h, Rgb fill = {0, 0, 0});

  Rgb at(std::size_t x, std::size_t y) const {
    const std::size_t o = 3 * (y * width + x);
    return {pixels[o], pixels[o + 1], pixels[o + 2]};
  }
  void set(std::size_t x, std::size_t y, Rgb c) {
    const std::size_t o = 3 * (y * width + x);
    pixels[o] = c[0];
    pixels[o + 1] = c[1];
    pixels[o + 2] = c[2];
  }

  friend bool operator==(const Image &, const Image &) = default;
};

using TextChunks = std::map<std::string, std::string>;

// PNG or JPEG, detected from the signature. Throws DataError when undecodable.
Image decode_image(std::span<const std::uint8_t> bytes);
Bytes encode_png(const Image &image, const TextChunks &text = {});
// tEXt chunks of a PNG; empty for other formats.
TextChunks read_png_text(std::span<const std::uint8_t> bytes);

// Reads a local path, file:// URI, or http(s) URL.
Bytes fetch_uri(const std::string &uri);

// Scales so the image covers a size x size square, then crops the centre.
// Bilinear sampling with clamped edges.
Image resize_fill(const Image &src, std::size_t size);

} // namespace neurolens
