#pragma once

#include "seg3d/image.hpp"

#include <string_view>

namespace seg3d {

enum class BandCenter { Median, Mean };

std::string_view to_string(BandCenter c) noexcept;
BandCenter parse_band_center(std::string_view s);

struct BandConfig {
  BandCenter center_mode = BandCenter::Median;
  double half_width_mm = 300.0;

  void validate() const;
};

/// Inclusive depth acceptance interval [lo, hi] in millimeters.
struct DepthBand {
  double center = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  static DepthBand around(double center, double half_width) {
    return {center, center - half_width, center + half_width};
  }
  bool contains(double depth_mm) const noexcept { return depth_mm >= lo && depth_mm <= hi; }
};

/// Band centered on the median (or mean) of the valid depths under the mask.
/// Throws NoValidDepth when no masked pixel has a nonzero depth, and
/// DimensionMismatch when the mask and depth sizes differ.
DepthBand compute_band(const DepthImage& depth, const BinaryGrid& mask, const BandConfig& cfg);

/// Pixels that are masked, have valid depth, and fall inside the band.
BinaryGrid apply_band(const DepthImage& depth, const BinaryGrid& mask, const DepthBand& band);

}  // namespace seg3d
