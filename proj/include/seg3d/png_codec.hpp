#pragma once

#include "seg3d/image.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace seg3d::png {

using Bytes = std::vector<std::uint8_t>;

/// Raw decode result. Samples are interleaved per pixel (channels per pixel),
/// widened to 16 bits regardless of the stored bit depth.
struct Decoded {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int channels = 0;  ///< 1 gray, 2 gray+alpha, 3 RGB, 4 RGBA
  std::vector<std::uint16_t> samples;
};

/// Throws Error(FormatError) on a malformed stream or a palette image.
Decoded decode(const Bytes& bytes);
Decoded decode_file(const std::filesystem::path& path);

/// Encodes any gray/gray+alpha/RGB/RGBA image at 8 or 16 bits per sample.
Bytes encode(const Decoded& img);

Bytes encode_rgb8(const ColorImage& img);
Bytes encode_gray8(const Grid<std::uint8_t>& img);
Bytes encode_gray16(const Grid<std::uint16_t>& img);

}  // namespace seg3d::png
