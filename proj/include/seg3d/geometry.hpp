#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace seg3d {

/// Pinhole intrinsics. Depth samples are converted to millimeters with depth_scale.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
  double depth_scale = 1.0;

  /// Throws Error(InvalidArgument) when any invariant is violated.
  void validate() const;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

struct PixelCoord {
  int col = 0;
  int row = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Result of forward projection: real-valued pixel position plus the depth
/// value a sensor using the same convention would report.
struct ImagePoint {
  double col = 0.0;
  double row = 0.0;
  double depth = 0.0;
};

enum class DepthModel {
  PlanarZ,      ///< depth is distance along the optical axis
  RayDistance,  ///< depth is Euclidean distance along the viewing ray
};

std::string_view to_string(DepthModel m) noexcept;
DepthModel parse_depth_model(std::string_view s);

/// sqrt(1 + (u/fx)^2 + (v/fy)^2), the ray length per unit of planar depth.
double ray_factor(double u, double v, const CameraIntrinsics& k) noexcept;

/// Back-projects an integer pixel. Throws InvalidDepth for depth <= 0 and
/// OutOfBounds for pixels outside the image.
Point3 back_project(PixelCoord p, double depth_mm, const CameraIntrinsics& k, DepthModel m);

/// Sub-pixel variant without bounds checks; used for round trips and rendering.
Point3 back_project(double col, double row, double depth_mm, const CameraIntrinsics& k,
                    DepthModel m);

/// Exact inverse of back_project. Throws NonPositiveZ when pt.z <= 0.
ImagePoint project(const Point3& pt, const CameraIntrinsics& k, DepthModel m);

CameraIntrinsics parse_intrinsics(std::string_view json_text);
CameraIntrinsics load_intrinsics(const std::filesystem::path& path);
std::string intrinsics_to_json(const CameraIntrinsics& k);

}  // namespace seg3d
