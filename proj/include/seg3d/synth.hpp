#pragma once

#include "seg3d/geometry.hpp"
#include "seg3d/image.hpp"
#include "seg3d/masks.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace seg3d {

/// Fronto-parallel rectangle facing the camera.
struct BoxFaceSpec {
  double width_mm = 0.0;
  double height_mm = 0.0;
  double center_depth_mm = 0.0;
  double offset_x_mm = 0.0;
  double offset_y_mm = 0.0;
  Rgb color{200, 40, 40};
  int id = 1;
  std::string class_name = "box";
};

struct SphereSpec {
  Point3 center;
  double radius_mm = 0.0;
  Rgb color{40, 160, 220};
  int id = 1;
  std::string class_name = "sphere";
};

struct GroundTruthObject {
  int id = 0;
  std::string class_name;
  double width_mm = 0.0;
  double height_mm = 0.0;
  double center_depth_mm = 0.0;
};

/// Optional uniform depth noise of +-jitter_mm applied to every valid pixel.
struct DepthJitter {
  double jitter_mm = 0.0;
  std::uint64_t seed = 0;
};

struct SynthScene {
  CameraIntrinsics intrinsics;
  ColorImage color;
  DepthImage depth;
  MaskManifest manifest;
  std::vector<InstanceMask> masks;
  std::vector<GroundTruthObject> ground_truth;
};

/// Face pixels are those whose ray meets the plane z = center_depth inside the
/// rectangle (edges inclusive); the rest see a background plane. Throws
/// InvalidArgument for a malformed spec and OutOfFrustum when the face leaves the image.
SynthScene render_box(const BoxFaceSpec& spec, const CameraIntrinsics& k, double background_depth_mm,
                      DepthModel model, const DepthJitter& jitter = {});

/// Analytic ray-sphere intersection against a background plane.
SynthScene render_sphere(const SphereSpec& spec, const CameraIntrinsics& k,
                         double background_depth_mm, DepthModel model,
                         const DepthJitter& jitter = {});

std::string ground_truth_to_json(const std::vector<GroundTruthObject>& objects);
std::vector<GroundTruthObject> parse_ground_truth(std::string_view json_text);

/// In-memory encodings of every scene file, keyed by file name, in write order.
std::vector<std::pair<std::string, std::vector<std::uint8_t>>> encode_scene(const SynthScene& s);

/// Writes color.png, depth.png, mask_<id>.png, manifest.json,
/// intrinsics.json and ground_truth.json into dir (created if needed).
void write_scene(const SynthScene& s, const std::filesystem::path& dir);

}  // namespace seg3d
