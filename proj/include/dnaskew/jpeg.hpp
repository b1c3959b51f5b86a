#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dnaskew {

/// Interleaved 8-bit samples, row-major.
struct Image {
  int width = 0;
  int height = 0;
  int components = 0;  // 1 (gray) or 3 (RGB)
  std::vector<std::uint8_t> pixels;

  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && components == o.components;
  }
};

/// Empty when the headers cannot be parsed. Corruption after the frame
/// header (bad entropy data, junk markers, premature end) still yields an
/// image of the declared size; rows not decoded are mid-gray.
std::optional<Image> decode_jpeg(std::span<const std::uint8_t> bytes);

/// Baseline JPEG; `quality` in 1..100.
std::vector<std::uint8_t> encode_jpeg(const Image& image, int quality = 85);

/// Deterministic smooth test picture with some texture, for tests and demos.
Image synthetic_image(int width, int height, int components, std::uint64_t seed);

}  // namespace dnaskew
