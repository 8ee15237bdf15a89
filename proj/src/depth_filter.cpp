#include "seg3d/depth_filter.hpp"

#include "seg3d/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace seg3d {

namespace {

void check_shape(const DepthImage& depth, const BinaryGrid& mask) {
  if (!mask.same_shape(depth.samples)) {
    throw Error(ErrorCode::DimensionMismatch,
                "mask is " + std::to_string(mask.width) + "x" + std::to_string(mask.height) +
                    ", depth is " + std::to_string(depth.width()) + "x" +
                    std::to_string(depth.height()));
  }
}

}  // namespace

std::string_view to_string(BandCenter c) noexcept {
  return c == BandCenter::Median ? "median" : "mean";
}

BandCenter parse_band_center(std::string_view s) {
  if (s == "median") return BandCenter::Median;
  if (s == "mean") return BandCenter::Mean;
  throw Error(ErrorCode::InvalidArgument, "unknown band center '" + std::string(s) + "'");
}

void BandConfig::validate() const {
  if (!(half_width_mm > 0.0) || !std::isfinite(half_width_mm)) {
    throw Error(ErrorCode::InvalidArgument, "band half-width must be positive");
  }
}

DepthBand compute_band(const DepthImage& depth, const BinaryGrid& mask, const BandConfig& cfg) {
  cfg.validate();
  check_shape(depth, mask);
  std::vector<double> values;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.data[i] && depth.samples.data[i] != 0) values.push_back(depth.millimeters(i));
  }
  if (values.empty()) throw Error(ErrorCode::NoValidDepth, "no masked pixel has a valid depth");

  double center = 0.0;
  if (cfg.center_mode == BandCenter::Mean) {
    center = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  } else {
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    center = values[mid];
    if (values.size() % 2 == 0) {
      const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
      center = 0.5 * (lower + center);
    }
  }
  return DepthBand::around(center, cfg.half_width_mm);
}

BinaryGrid apply_band(const DepthImage& depth, const BinaryGrid& mask, const DepthBand& band) {
  check_shape(depth, mask);
  BinaryGrid kept(mask.width, mask.height, 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    kept.data[i] = mask.data[i] && depth.samples.data[i] != 0 && band.contains(depth.millimeters(i));
  }
  return kept;
}

}  // namespace seg3d
