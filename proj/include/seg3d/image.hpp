#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace seg3d {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 2D buffer. Index (col, row) maps to data[row * width + col].
template <typename T>
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(int w, int h, T fill = T{})
      : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  std::size_t size() const noexcept { return data.size(); }
  std::size_t index(int col, int row) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(col);
  }
  bool contains(int col, int row) const noexcept {
    return col >= 0 && row >= 0 && col < width && row < height;
  }
  T& at(int col, int row) noexcept { return data[index(col, row)]; }
  const T& at(int col, int row) const noexcept { return data[index(col, row)]; }

  bool same_shape(int w, int h) const noexcept { return width == w && height == h; }
  template <typename U>
  bool same_shape(const Grid<U>& o) const noexcept {
    return width == o.width && height == o.height;
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Boolean per-pixel membership; cells hold 0 or 1.
using BinaryGrid = Grid<std::uint8_t>;

using ColorImage = Grid<Rgb>;

/// Raw 16-bit depth samples; sample * depth_scale gives millimeters, 0 is invalid.
struct DepthImage {
  Grid<std::uint16_t> samples;
  double depth_scale = 1.0;

  int width() const noexcept { return samples.width; }
  int height() const noexcept { return samples.height; }
  std::uint16_t raw(int col, int row) const noexcept { return samples.at(col, row); }
  bool valid(int col, int row) const noexcept { return samples.at(col, row) != 0; }
  double millimeters(int col, int row) const noexcept {
    return static_cast<double>(samples.at(col, row)) * depth_scale;
  }
  double millimeters(std::size_t i) const noexcept {
    return static_cast<double>(samples.data[i]) * depth_scale;
  }
};

std::size_t popcount(const BinaryGrid& g) noexcept;

}  // namespace seg3d
