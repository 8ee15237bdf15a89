#include "seg3d/rgbd_io.hpp"

#include "seg3d/error.hpp"
#include "seg3d/png_codec.hpp"

#include <string>

namespace seg3d {

namespace {

std::string size_str(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

}  // namespace

ColorImage load_color(const std::filesystem::path& path) {
  const png::Decoded png = png::decode_file(path);
  if (png.bit_depth != 8 || (png.channels != 3 && png.channels != 4)) {
    throw Error(ErrorCode::FormatError,
                path.string() + ": color image must be 8-bit RGB or RGBA (got " +
                    std::to_string(png.bit_depth) + "-bit, " + std::to_string(png.channels) +
                    " channels)");
  }
  ColorImage img(png.width, png.height);
  const auto stride = static_cast<std::size_t>(png.channels);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const std::uint16_t* px = png.samples.data() + i * stride;
    img.data[i] = Rgb{static_cast<std::uint8_t>(px[0]), static_cast<std::uint8_t>(px[1]),
                      static_cast<std::uint8_t>(px[2])};
  }
  return img;
}

DepthImage load_depth(const std::filesystem::path& path, const CameraIntrinsics& k) {
  const png::Decoded png = png::decode_file(path);
  if (png.bit_depth != 16 || png.channels != 1) {
    throw Error(ErrorCode::FormatError,
                path.string() + ": depth image must be 16-bit single-channel (got " +
                    std::to_string(png.bit_depth) + "-bit, " + std::to_string(png.channels) +
                    " channels)");
  }
  if (png.width != k.width || png.height != k.height) {
    throw Error(ErrorCode::DimensionMismatch, path.string() + ": depth is " +
                                                  size_str(png.width, png.height) +
                                                  " but intrinsics say " +
                                                  size_str(k.width, k.height));
  }
  DepthImage depth;
  depth.depth_scale = k.depth_scale;
  depth.samples = Grid<std::uint16_t>(png.width, png.height);
  depth.samples.data = png.samples;
  return depth;
}

void validate_alignment(const ColorImage& color, const DepthImage& depth) {
  if (!color.same_shape(depth.samples)) {
    throw Error(ErrorCode::DimensionMismatch, "color is " + size_str(color.width, color.height) +
                                                  " but depth is " +
                                                  size_str(depth.width(), depth.height()));
  }
}

}  // namespace seg3d
