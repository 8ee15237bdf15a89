#pragma once

#include "seg3d/geometry.hpp"
#include "seg3d/image.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seg3d {

struct InstanceMask {
  int id = 0;
  std::string class_name;
  double score = 1.0;
  BinaryGrid bitmap;
};

struct ManifestEntry {
  int id = 0;
  std::string class_name;
  double score = 1.0;
  std::string mask_file;  ///< relative to the manifest's directory
};

struct MaskManifest {
  std::string color_image;
  std::vector<ManifestEntry> instances;
};

struct LoadedMasks {
  MaskManifest manifest;
  std::vector<InstanceMask> masks;  ///< same order as manifest.instances
};

/// Outer boundary of one 8-connected component.
struct Contour {
  std::vector<PixelCoord> points;  ///< closed chain; the closing edge back to points[0] is implied
  std::size_t enclosed_area = 0;   ///< pixel count of the component (holes excluded)
};

MaskManifest parse_manifest(std::string_view json_text);
std::string manifest_to_json(const MaskManifest& m);

/// Parses the manifest and decodes every mask PNG (8-bit gray, values 0/255).
LoadedMasks load_manifest(const std::filesystem::path& path);

/// Decodes a single mask PNG into a 0/1 grid. Throws NonBinaryMask on gray values.
BinaryGrid load_mask_png(const std::filesystem::path& path);

/// One contour per 8-connected component, in raster order of each component's
/// first pixel. Tracing is Moore-neighbor border following, clockwise on screen.
std::vector<Contour> find_contours(const BinaryGrid& bitmap);
inline std::vector<Contour> find_contours(const InstanceMask& m) { return find_contours(m.bitmap); }

/// All true pixels in row-major order.
std::vector<PixelCoord> region_pixels(const BinaryGrid& bitmap);
inline std::vector<PixelCoord> region_pixels(const InstanceMask& m) { return region_pixels(m.bitmap); }

/// Pixelwise OR over a frame of the given size. Throws DimensionMismatch.
BinaryGrid mask_union(std::span<const InstanceMask> masks, int width, int height);

}  // namespace seg3d
