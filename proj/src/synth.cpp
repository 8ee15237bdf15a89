#include "seg3d/synth.hpp"

#include "seg3d/atomic_file.hpp"
#include "seg3d/error.hpp"
#include "seg3d/png_codec.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

namespace seg3d {

namespace {

Rgb background_color(int col, int row) {
  return Rgb{static_cast<std::uint8_t>(col & 0xff), static_cast<std::uint8_t>(row & 0xff), 96};
}

std::uint16_t encode_depth(double depth_mm, double depth_scale) {
  const double units = std::round(depth_mm / depth_scale);
  if (!(units >= 1.0 && units <= 65535.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "depth " + std::to_string(depth_mm) + " mm does not fit a 16-bit sample");
  }
  return static_cast<std::uint16_t>(units);
}

double encoded_depth(double z, double u, double v, const CameraIntrinsics& k, DepthModel m) {
  return m == DepthModel::PlanarZ ? z : z * ray_factor(u, v, k);
}

SynthScene blank_scene(const CameraIntrinsics& k) {
  SynthScene s;
  s.intrinsics = k;
  s.color = ColorImage(k.width, k.height);
  s.depth.depth_scale = k.depth_scale;
  s.depth.samples = Grid<std::uint16_t>(k.width, k.height, 0);
  return s;
}

void finish_scene(SynthScene& s, BinaryGrid mask, int id, const std::string& class_name,
                  const GroundTruthObject& gt, const DepthJitter& jitter) {
  if (popcount(mask) == 0) throw Error(ErrorCode::OutOfFrustum, "object covers no pixel");
  if (jitter.jitter_mm > 0.0) {
    std::mt19937_64 rng(jitter.seed);
    std::uniform_real_distribution<double> noise(-jitter.jitter_mm, jitter.jitter_mm);
    for (auto& v : s.depth.samples.data) {
      const double mm = v * s.depth.depth_scale + noise(rng);
      v = encode_depth(mm, s.depth.depth_scale);
    }
  }
  InstanceMask m;
  m.id = id;
  m.class_name = class_name;
  m.score = 1.0;
  m.bitmap = std::move(mask);
  s.masks.push_back(std::move(m));
  s.manifest.color_image = "color.png";
  s.manifest.instances.push_back({id, class_name, 1.0, "mask_" + std::to_string(id) + ".png"});
  s.ground_truth.push_back(gt);
}

void check_common(const CameraIntrinsics& k, int id) {
  k.validate();
  if (id <= 0) throw Error(ErrorCode::InvalidArgument, "object id must be positive");
}

}  // namespace

SynthScene render_box(const BoxFaceSpec& spec, const CameraIntrinsics& k, double background_depth_mm,
                      DepthModel model, const DepthJitter& jitter) {
  check_common(k, spec.id);
  if (!(spec.width_mm > 0.0) || !(spec.height_mm > 0.0) || !(spec.center_depth_mm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "box width, height and depth must be positive");
  }
  if (!(background_depth_mm > spec.center_depth_mm)) {
    throw Error(ErrorCode::InvalidArgument, "background must lie behind the box face");
  }
  const double z = spec.center_depth_mm;
  const double left = spec.offset_x_mm - spec.width_mm / 2;
  const double right = spec.offset_x_mm + spec.width_mm / 2;
  const double top = spec.offset_y_mm - spec.height_mm / 2;
  const double bottom = spec.offset_y_mm + spec.height_mm / 2;
  if (left * k.fx / z + k.cx < 0.0 || right * k.fx / z + k.cx > k.width - 1 ||
      top * k.fy / z + k.cy < 0.0 || bottom * k.fy / z + k.cy > k.height - 1) {
    throw Error(ErrorCode::OutOfFrustum, "box face extends beyond the image");
  }

  SynthScene s = blank_scene(k);
  BinaryGrid mask(k.width, k.height, 0);
  for (int row = 0; row < k.height; ++row) {
    const double v = row - k.cy;
    const double y = v * z / k.fy;
    for (int col = 0; col < k.width; ++col) {
      const double u = col - k.cx;
      const double x = u * z / k.fx;
      const bool face = x >= left && x <= right && y >= top && y <= bottom;
      const double plane = face ? z : background_depth_mm;
      s.depth.samples.at(col, row) = encode_depth(encoded_depth(plane, u, v, k, model), k.depth_scale);
      s.color.at(col, row) = face ? spec.color : background_color(col, row);
      mask.at(col, row) = face ? 1 : 0;
    }
  }
  finish_scene(s, std::move(mask), spec.id, spec.class_name,
               {spec.id, spec.class_name, spec.width_mm, spec.height_mm, z}, jitter);
  return s;
}

SynthScene render_sphere(const SphereSpec& spec, const CameraIntrinsics& k,
                         double background_depth_mm, DepthModel model, const DepthJitter& jitter) {
  check_common(k, spec.id);
  const Point3 c = spec.center;
  const double r = spec.radius_mm;
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "sphere radius must be positive");
  if (!(c.z > r)) throw Error(ErrorCode::OutOfFrustum, "sphere must lie entirely in front of the camera");
  if (!(background_depth_mm > c.z + r)) {
    throw Error(ErrorCode::InvalidArgument, "sphere must lie in front of the background plane");
  }

  SynthScene s = blank_scene(k);
  BinaryGrid mask(k.width, k.height, 0);
  const double cc = c.x * c.x + c.y * c.y + c.z * c.z - r * r;
  for (int row = 0; row < k.height; ++row) {
    const double v = row - k.cy;
    const double dy = v / k.fy;
    for (int col = 0; col < k.width; ++col) {
      const double u = col - k.cx;
      const double dx = u / k.fx;
      // Ray p = t * (dx, dy, 1); solve |p - c|^2 = r^2 for the nearest t.
      const double a = dx * dx + dy * dy + 1.0;
      const double half_b = -(dx * c.x + dy * c.y + c.z);
      const double disc = half_b * half_b - a * cc;
      double plane = background_depth_mm;
      bool hit = false;
      if (disc >= 0.0) {
        // cc > 0 because the camera is outside the sphere; this form avoids cancellation.
        plane = cc / (-half_b + std::sqrt(disc));
        hit = true;
      }
      s.depth.samples.at(col, row) = encode_depth(encoded_depth(plane, u, v, k, model), k.depth_scale);
      s.color.at(col, row) = hit ? spec.color : background_color(col, row);
      mask.at(col, row) = hit ? 1 : 0;
      if (hit && (col == 0 || row == 0 || col == k.width - 1 || row == k.height - 1)) {
        throw Error(ErrorCode::OutOfFrustum, "sphere silhouette touches the image border");
      }
    }
  }
  finish_scene(s, std::move(mask), spec.id, spec.class_name,
               {spec.id, spec.class_name, 2 * r, 2 * r, c.z}, jitter);
  return s;
}

std::string ground_truth_to_json(const std::vector<GroundTruthObject>& objects) {
  nlohmann::ordered_json j;
  j["objects"] = nlohmann::ordered_json::array();
  for (const auto& o : objects) {
    j["objects"].push_back({{"id", o.id},
                            {"class_name", o.class_name},
                            {"width_mm", o.width_mm},
                            {"height_mm", o.height_mm},
                            {"center_depth_mm", o.center_depth_mm}});
  }
  return j.dump(2) + "\n";
}

std::vector<GroundTruthObject> parse_ground_truth(std::string_view json_text) {
  std::vector<GroundTruthObject> out;
  try {
    const auto j = nlohmann::json::parse(json_text);
    for (const auto& o : j.at("objects")) {
      out.push_back({o.at("id").get<int>(), o.at("class_name").get<std::string>(),
                     o.at("width_mm").get<double>(), o.at("height_mm").get<double>(),
                     o.at("center_depth_mm").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("ground truth: ") + e.what());
  }
  return out;
}

std::vector<std::pair<std::string, std::vector<std::uint8_t>>> encode_scene(const SynthScene& s) {
  auto text = [](const std::string& t) { return std::vector<std::uint8_t>(t.begin(), t.end()); };
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> files;
  files.emplace_back("color.png", png::encode_rgb8(s.color));
  files.emplace_back("depth.png", png::encode_gray16(s.depth.samples));
  for (std::size_t i = 0; i < s.masks.size(); ++i) {
    Grid<std::uint8_t> gray(s.masks[i].bitmap.width, s.masks[i].bitmap.height);
    for (std::size_t p = 0; p < gray.size(); ++p) gray.data[p] = s.masks[i].bitmap.data[p] ? 255 : 0;
    files.emplace_back(s.manifest.instances[i].mask_file, png::encode_gray8(gray));
  }
  files.emplace_back("manifest.json", text(manifest_to_json(s.manifest)));
  files.emplace_back("intrinsics.json", text(intrinsics_to_json(s.intrinsics)));
  files.emplace_back("ground_truth.json", text(ground_truth_to_json(s.ground_truth)));
  return files;
}

void write_scene(const SynthScene& s, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [name, bytes] : encode_scene(s)) write_file_atomic(dir / name, bytes);
}

}  // namespace seg3d
