#pragma once

#include "seg3d/geometry.hpp"
#include "seg3d/image.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace seg3d {

/// Points in millimeters with a parallel color list.
struct PointCloud {
  std::vector<Point3> points;
  std::vector<Rgb> colors;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  void reserve(std::size_t n) {
    points.reserve(n);
    colors.reserve(n);
  }
  void push_back(const Point3& p, Rgb c) {
    points.push_back(p);
    colors.push_back(c);
  }
};

enum class LengthUnit { Millimeters, Meters };

LengthUnit parse_length_unit(std::string_view s);

enum class Axis { X, Y, Z };

std::string_view to_string(Axis a) noexcept;
Axis parse_axis(std::string_view s);

/// Serializes the cloud as ASCII PLY with float32 xyz and uchar rgb.
std::string ply_to_string(const PointCloud& pc, LengthUnit units = LengthUnit::Millimeters);
void export_ply(const PointCloud& pc, const std::filesystem::path& path,
                LengthUnit units = LengthUnit::Millimeters);

/// Parses an ASCII PLY produced by export_ply (comment lines are tolerated).
/// Coordinates come back as written; the caller tracks units.
PointCloud parse_ply(std::string_view text);
PointCloud import_ply(const std::filesystem::path& path);

struct ExtentReport {
  Axis axis = Axis::X;
  double extent = 0.0;
  double trim_fraction = 0.0;
  std::size_t point_count = 0;  ///< points remaining after trimming
};

/// Sorts coordinates along the axis, drops floor(trim_fraction * N) from each
/// tail, and returns max - min of what remains.
ExtentReport measure_extent(const PointCloud& pc, Axis axis, double trim_fraction);

}  // namespace seg3d
