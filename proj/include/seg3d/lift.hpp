#pragma once

#include "seg3d/depth_filter.hpp"
#include "seg3d/geometry.hpp"
#include "seg3d/image.hpp"
#include "seg3d/masks.hpp"
#include "seg3d/pointcloud.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seg3d {

enum class OverlapPolicy {
  FirstWins,  ///< a pixel kept by an earlier instance is withheld from later ones
  Duplicate,  ///< overlapping pixels are emitted for every instance that keeps them
};

std::string_view to_string(OverlapPolicy p) noexcept;

struct LiftConfig {
  DepthModel depth_model = DepthModel::PlanarZ;
  std::optional<BandConfig> band = BandConfig{};  ///< nullopt disables band filtering
  bool emit_background = true;
  OverlapPolicy overlap_policy = OverlapPolicy::FirstWins;
};

/// Every masked pixel lands in exactly one bucket.
struct InstanceStats {
  std::size_t masked = 0;
  std::size_t kept = 0;
  std::size_t dropped_by_band = 0;
  std::size_t dropped_by_overlap = 0;
  std::size_t invalid_depth = 0;
};

struct InstanceResult {
  int id = 0;
  std::string class_name;
  double score = 0.0;
  PointCloud cloud;
  InstanceStats stats;
  std::optional<DepthBand> band;       ///< absent when filtering is disabled or failed
  std::optional<std::string> failure;  ///< set when the instance could not be lifted

  bool ok() const noexcept { return !failure.has_value(); }
};

struct SceneSegmentation {
  std::vector<InstanceResult> instances;
  std::optional<PointCloud> background;

  bool has_failures() const noexcept;
};

/// Pixels of the mask that survive band filtering (or merely have valid depth
/// when the band is disabled). Throws NoValidDepth if no masked pixel has depth.
BinaryGrid select_instance_pixels(const DepthImage& depth, const BinaryGrid& mask,
                                  const LiftConfig& cfg, std::optional<DepthBand>* band_out = nullptr);

/// Back-projects every selected pixel in row-major order, colored from the frame.
PointCloud lift_pixels(const ColorImage& color, const DepthImage& depth, const BinaryGrid& selected,
                       const CameraIntrinsics& k, DepthModel model);

PointCloud lift_instance(const ColorImage& color, const DepthImage& depth, const InstanceMask& mask,
                         const CameraIntrinsics& k, const LiftConfig& cfg);

/// Valid-depth pixels outside kept_union; no band filtering.
PointCloud lift_background(const ColorImage& color, const DepthImage& depth,
                           const BinaryGrid& kept_union, const CameraIntrinsics& k,
                           const LiftConfig& cfg);

/// Lifts every instance in the given order plus the complementary background.
/// Per-instance NoValidDepth is recorded on the result; size mismatches throw.
SceneSegmentation lift_scene(const ColorImage& color, const DepthImage& depth,
                             std::span<const InstanceMask> masks, const CameraIntrinsics& k,
                             const LiftConfig& cfg);

/// instance_<id>_<class>.ply with unsafe characters in the class replaced by '_'.
std::string instance_file_name(int id, std::string_view class_name);

/// Stats report: per-instance counts, bands, and an echo of the configuration.
std::string scene_report_json(const SceneSegmentation& seg, const LiftConfig& cfg,
                              const CameraIntrinsics& k, LengthUnit units);

/// Writes PLYs for successful instances, background.ply when present, and
/// scene.json. Returns the written file names in write order.
std::vector<std::string> write_scene_outputs(const SceneSegmentation& seg, const LiftConfig& cfg,
                                             const CameraIntrinsics& k,
                                             const std::filesystem::path& out_dir,
                                             LengthUnit units = LengthUnit::Millimeters);

}  // namespace seg3d
