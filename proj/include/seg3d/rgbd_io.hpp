#pragma once

#include "seg3d/geometry.hpp"
#include "seg3d/image.hpp"

#include <filesystem>

namespace seg3d {

/// Loads an 8-bit RGB or RGBA PNG; alpha is dropped.
ColorImage load_color(const std::filesystem::path& path);

/// Loads a 16-bit single-channel PNG whose size must match the intrinsics.
/// The returned image carries k.depth_scale.
DepthImage load_depth(const std::filesystem::path& path, const CameraIntrinsics& k);

/// Throws DimensionMismatch naming both sizes when color and depth differ.
void validate_alignment(const ColorImage& color, const DepthImage& depth);

}  // namespace seg3d
