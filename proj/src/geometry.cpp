#include "seg3d/geometry.hpp"

#include "seg3d/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace seg3d {

void CameraIntrinsics::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (!(fx > 0.0) || !std::isfinite(fx)) fail("fx must be positive");
  if (!(fy > 0.0) || !std::isfinite(fy)) fail("fy must be positive");
  if (width <= 0 || height <= 0) fail("image size must be positive");
  if (!(depth_scale > 0.0) || !std::isfinite(depth_scale)) fail("depth_scale must be positive");
  if (!(cx >= 0.0 && cx < width)) fail("cx must lie in [0, width)");
  if (!(cy >= 0.0 && cy < height)) fail("cy must lie in [0, height)");
}

std::string_view to_string(DepthModel m) noexcept {
  return m == DepthModel::PlanarZ ? "planar" : "ray";
}

DepthModel parse_depth_model(std::string_view s) {
  if (s == "planar") return DepthModel::PlanarZ;
  if (s == "ray") return DepthModel::RayDistance;
  throw Error(ErrorCode::InvalidArgument, "unknown depth model '" + std::string(s) + "'");
}

double ray_factor(double u, double v, const CameraIntrinsics& k) noexcept {
  const double a = u / k.fx;
  const double b = v / k.fy;
  return std::sqrt(1.0 + a * a + b * b);
}

Point3 back_project(double col, double row, double depth_mm, const CameraIntrinsics& k,
                    DepthModel m) {
  if (!(depth_mm > 0.0)) throw Error(ErrorCode::InvalidDepth, "depth must be positive");
  const double u = col - k.cx;
  const double v = row - k.cy;
  const double z = m == DepthModel::PlanarZ ? depth_mm : depth_mm / ray_factor(u, v, k);
  return {u * z / k.fx, v * z / k.fy, z};
}

Point3 back_project(PixelCoord p, double depth_mm, const CameraIntrinsics& k, DepthModel m) {
  if (p.col < 0 || p.row < 0 || p.col >= k.width || p.row >= k.height) {
    throw Error(ErrorCode::OutOfBounds, "pixel (" + std::to_string(p.col) + ", " +
                                            std::to_string(p.row) + ") outside " +
                                            std::to_string(k.width) + "x" +
                                            std::to_string(k.height));
  }
  return back_project(static_cast<double>(p.col), static_cast<double>(p.row), depth_mm, k, m);
}

ImagePoint project(const Point3& pt, const CameraIntrinsics& k, DepthModel m) {
  if (!(pt.z > 0.0)) throw Error(ErrorCode::NonPositiveZ, "point must lie in front of the camera");
  const double u = pt.x * k.fx / pt.z;
  const double v = pt.y * k.fy / pt.z;
  const double d = m == DepthModel::PlanarZ ? pt.z : pt.z * ray_factor(u, v, k);
  return {u + k.cx, v + k.cy, d};
}

CameraIntrinsics parse_intrinsics(std::string_view json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("intrinsics: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "intrinsics must be a JSON object");

  static constexpr std::string_view kKeys[] = {"fx", "fy", "cx", "cy", "width", "height",
                                               "depth_scale"};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto k : kKeys) known = known || key == k;
    if (!known) throw Error(ErrorCode::SchemaError, "intrinsics: unknown key '" + key + "'");
    if (!value.is_number()) {
      throw Error(ErrorCode::SchemaError, "intrinsics: '" + key + "' must be numeric");
    }
  }
  auto number = [&](const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::SchemaError, std::string("intrinsics: missing '") + key + "'");
    return j.at(key).get<double>();
  };
  auto integer = [&](const char* key) {
    const double v = number(key);
    if (v != std::floor(v)) throw Error(ErrorCode::SchemaError, std::string("intrinsics: '") + key + "' must be an integer");
    return static_cast<int>(v);
  };

  CameraIntrinsics k;
  k.fx = number("fx");
  k.fy = number("fy");
  k.cx = number("cx");
  k.cy = number("cy");
  k.width = integer("width");
  k.height = integer("height");
  k.depth_scale = j.contains("depth_scale") ? number("depth_scale") : 1.0;
  try {
    k.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::SchemaError, std::string("intrinsics: ") + e.what());
  }
  return k;
}

CameraIntrinsics load_intrinsics(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_intrinsics(ss.str());
}

std::string intrinsics_to_json(const CameraIntrinsics& k) {
  nlohmann::ordered_json j;
  j["fx"] = k.fx;
  j["fy"] = k.fy;
  j["cx"] = k.cx;
  j["cy"] = k.cy;
  j["width"] = k.width;
  j["height"] = k.height;
  j["depth_scale"] = k.depth_scale;
  return j.dump(2) + "\n";
}

}  // namespace seg3d
