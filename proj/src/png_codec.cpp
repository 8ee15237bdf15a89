#include "seg3d/png_codec.hpp"

#include "seg3d/atomic_file.hpp"
#include "seg3d/error.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <string>

namespace seg3d::png {
namespace {

struct ReadCursor {
  const Bytes* bytes;
  std::size_t offset;
};

void read_fn(png_structp p, png_bytep out, png_size_t n) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(p));
  if (cur->offset + n > cur->bytes->size()) png_error(p, "unexpected end of stream");
  std::memcpy(out, cur->bytes->data() + cur->offset, n);
  cur->offset += n;
}

void write_fn(png_structp p, png_bytep data, png_size_t n) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(p));
  out->insert(out->end(), data, data + n);
}

void flush_fn(png_structp) {}

void error_fn(png_structp p, png_const_charp msg) {
  auto* buf = static_cast<std::string*>(png_get_error_ptr(p));
  if (buf) *buf = msg;
  png_longjmp(p, 1);
}

void warning_fn(png_structp, png_const_charp) {}

// Kept free of objects with non-trivial destructors because of setjmp/longjmp.
bool decode_raw(const Bytes& bytes, Decoded& out, std::vector<png_bytep>& rows,
                std::vector<std::uint8_t>& pixels, std::string& err) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, error_fn, warning_fn);
  if (!png) {
    err = "png_create_read_struct failed";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    err = "png_create_info_struct failed";
    return false;
  }
  ReadCursor cursor{&bytes, 0};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &cursor, read_fn);
  png_read_info(png, info);

  const auto width = png_get_image_width(png, info);
  const auto height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    err = "palette PNGs are not supported";
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  if (bit_depth != 8 && bit_depth != 16) {
    err = "unsupported bit depth " + std::to_string(bit_depth);
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(width);
  out.height = static_cast<int>(height);
  out.bit_depth = bit_depth;
  out.channels = png_get_channels(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  pixels.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = pixels.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode_raw(int width, int height, int bit_depth, int color_type,
                const std::vector<png_bytep>& rows, Bytes& out, std::string& err) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, error_fn, warning_fn);
  if (!png) {
    err = "png_create_write_struct failed";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    err = "png_create_info_struct failed";
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &out, write_fn, flush_fn);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

Bytes encode_packed(int width, int height, int bit_depth, int color_type, int channels,
                    std::vector<std::uint8_t>& packed) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "cannot encode empty image");
  const std::size_t rowbytes =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(channels) * (bit_depth / 8);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) rows[static_cast<std::size_t>(r)] = packed.data() + r * rowbytes;
  Bytes out;
  std::string err;
  if (!encode_raw(width, height, bit_depth, color_type, rows, out, err)) {
    throw Error(ErrorCode::FormatError, "PNG encode failed: " + err);
  }
  return out;
}

}  // namespace

Decoded decode(const Bytes& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::FormatError, "not a PNG stream");
  }
  Decoded out;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> pixels;
  std::string err;
  if (!decode_raw(bytes, out, rows, pixels, err)) {
    throw Error(ErrorCode::FormatError, "PNG decode failed: " + err);
  }
  const std::size_t n = static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.samples.resize(n);
  if (out.bit_depth == 8) {
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = pixels[i];
  } else {
    // PNG stores 16-bit samples big-endian.
    for (std::size_t i = 0; i < n; ++i) {
      out.samples[i] = static_cast<std::uint16_t>((pixels[2 * i] << 8) | pixels[2 * i + 1]);
    }
  }
  return out;
}

Decoded decode_file(const std::filesystem::path& path) {
  const Bytes bytes = read_file_bytes(path);
  try {
    return decode(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Bytes encode(const Decoded& img) {
  static constexpr int kColorTypes[] = {PNG_COLOR_TYPE_GRAY, PNG_COLOR_TYPE_GRAY_ALPHA,
                                        PNG_COLOR_TYPE_RGB, PNG_COLOR_TYPE_RGB_ALPHA};
  if (img.channels < 1 || img.channels > 4 || (img.bit_depth != 8 && img.bit_depth != 16)) {
    throw Error(ErrorCode::InvalidArgument, "unsupported PNG layout");
  }
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
  if (img.samples.size() != n) throw Error(ErrorCode::InvalidArgument, "sample count mismatch");
  std::vector<std::uint8_t> packed;
  packed.reserve(n * (img.bit_depth / 8));
  for (std::uint16_t v : img.samples) {
    if (img.bit_depth == 16) packed.push_back(static_cast<std::uint8_t>(v >> 8));
    packed.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return encode_packed(img.width, img.height, img.bit_depth, kColorTypes[img.channels - 1],
                       img.channels, packed);
}

Bytes encode_rgb8(const ColorImage& img) {
  std::vector<std::uint8_t> packed;
  packed.reserve(img.size() * 3);
  for (const Rgb& p : img.data) {
    packed.push_back(p.r);
    packed.push_back(p.g);
    packed.push_back(p.b);
  }
  return encode_packed(img.width, img.height, 8, PNG_COLOR_TYPE_RGB, 3, packed);
}

Bytes encode_gray8(const Grid<std::uint8_t>& img) {
  std::vector<std::uint8_t> packed(img.data);
  return encode_packed(img.width, img.height, 8, PNG_COLOR_TYPE_GRAY, 1, packed);
}

Bytes encode_gray16(const Grid<std::uint16_t>& img) {
  std::vector<std::uint8_t> packed;
  packed.reserve(img.size() * 2);
  for (std::uint16_t v : img.data) {
    packed.push_back(static_cast<std::uint8_t>(v >> 8));
    packed.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return encode_packed(img.width, img.height, 16, PNG_COLOR_TYPE_GRAY, 1, packed);
}

}  // namespace seg3d::png
