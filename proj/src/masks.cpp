#include "seg3d/masks.hpp"

#include "seg3d/atomic_file.hpp"
#include "seg3d/error.hpp"
#include "seg3d/png_codec.hpp"

#include <array>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace seg3d {

namespace {

using nlohmann::json;

[[noreturn]] void schema_fail(const std::string& what) {
  throw Error(ErrorCode::SchemaError, "manifest: " + what);
}

// Clockwise on screen (row axis points down), starting west.
constexpr std::array<PixelCoord, 8> kDirs{{
    {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1},
}};

int dir_index(int dc, int dr) {
  for (int i = 0; i < 8; ++i) {
    if (kDirs[i].col == dc && kDirs[i].row == dr) return i;
  }
  throw std::logic_error("not a neighbor offset");
}

struct Step {
  bool found = false;
  PixelCoord next;
  int backtrack = 0;  ///< direction from next to the last background pixel examined
};

Step moore_step(const BinaryGrid& g, PixelCoord cur, int backtrack) {
  auto fg = [&](int c, int r) { return g.contains(c, r) && g.at(c, r) != 0; };
  for (int i = 1; i <= 8; ++i) {
    const int d = (backtrack + i) % 8;
    const PixelCoord n{cur.col + kDirs[d].col, cur.row + kDirs[d].row};
    if (fg(n.col, n.row)) {
      const PixelCoord prev{cur.col + kDirs[(d + 7) % 8].col, cur.row + kDirs[(d + 7) % 8].row};
      return {true, n, dir_index(prev.col - n.col, prev.row - n.row)};
    }
  }
  return {};
}

std::vector<PixelCoord> trace_outer(const BinaryGrid& g, PixelCoord start, std::size_t area) {
  std::vector<PixelCoord> points{start};
  // The start is the component's first pixel in raster order, so its west neighbor is background.
  Step s = moore_step(g, start, 0);
  if (!s.found) return points;
  const PixelCoord second = s.next;
  const std::size_t limit = 8 * area + 16;
  for (std::size_t iter = 0; iter < limit; ++iter) {
    const PixelCoord cur = s.next;
    s = moore_step(g, cur, s.backtrack);
    if (cur == start && s.next == second) return points;
    points.push_back(cur);
  }
  throw std::logic_error("contour trace did not close");
}

}  // namespace

MaskManifest parse_manifest(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema_fail(e.what());
  }
  if (!j.is_object()) schema_fail("top level must be an object");
  if (!j.contains("color_image") || !j["color_image"].is_string()) {
    schema_fail("'color_image' must be a string");
  }
  if (!j.contains("instances") || !j["instances"].is_array()) {
    schema_fail("'instances' must be an array");
  }
  MaskManifest m;
  m.color_image = j["color_image"].get<std::string>();
  std::set<int> seen;
  for (const auto& inst : j["instances"]) {
    if (!inst.is_object()) schema_fail("each instance must be an object");
    ManifestEntry e;
    if (!inst.contains("id") || !inst["id"].is_number_integer()) schema_fail("instance 'id' must be an integer");
    const auto id = inst["id"].get<long long>();
    if (id <= 0 || id > 0x7fffffff) schema_fail("instance 'id' must be a positive integer");
    e.id = static_cast<int>(id);
    if (!inst.contains("class_name") || !inst["class_name"].is_string()) {
      schema_fail("instance 'class_name' must be a string");
    }
    e.class_name = inst["class_name"].get<std::string>();
    if (inst.contains("score")) {
      if (!inst["score"].is_number()) schema_fail("instance 'score' must be numeric");
      e.score = inst["score"].get<double>();
      if (!(e.score >= 0.0 && e.score <= 1.0)) schema_fail("instance 'score' must lie in [0, 1]");
    }
    if (!inst.contains("mask_file") || !inst["mask_file"].is_string()) {
      schema_fail("instance 'mask_file' must be a string");
    }
    e.mask_file = inst["mask_file"].get<std::string>();
    if (!seen.insert(e.id).second) {
      throw Error(ErrorCode::DuplicateId, "manifest: duplicate instance id " + std::to_string(e.id));
    }
    m.instances.push_back(std::move(e));
  }
  return m;
}

std::string manifest_to_json(const MaskManifest& m) {
  nlohmann::ordered_json j;
  j["color_image"] = m.color_image;
  j["instances"] = nlohmann::ordered_json::array();
  for (const auto& e : m.instances) {
    nlohmann::ordered_json i;
    i["id"] = e.id;
    i["class_name"] = e.class_name;
    i["score"] = e.score;
    i["mask_file"] = e.mask_file;
    j["instances"].push_back(std::move(i));
  }
  return j.dump(2) + "\n";
}

BinaryGrid load_mask_png(const std::filesystem::path& path) {
  const png::Decoded png = png::decode_file(path);
  if (png.bit_depth != 8 || png.channels != 1) {
    throw Error(ErrorCode::FormatError, path.string() + ": mask must be 8-bit single-channel");
  }
  BinaryGrid g(png.width, png.height);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto v = png.samples[i];
    if (v != 0 && v != 255) {
      throw Error(ErrorCode::NonBinaryMask,
                  path.string() + ": value " + std::to_string(v) + " at index " + std::to_string(i));
    }
    g.data[i] = v == 255 ? 1 : 0;
  }
  return g;
}

LoadedMasks load_manifest(const std::filesystem::path& path) {
  LoadedMasks out;
  out.manifest = parse_manifest(read_file_text(path));
  const auto dir = path.parent_path();
  for (const auto& e : out.manifest.instances) {
    InstanceMask m;
    m.id = e.id;
    m.class_name = e.class_name;
    m.score = e.score;
    m.bitmap = load_mask_png(dir / e.mask_file);
    out.masks.push_back(std::move(m));
  }
  return out;
}

std::vector<Contour> find_contours(const BinaryGrid& g) {
  std::vector<Contour> contours;
  std::vector<std::uint8_t> visited(g.size(), 0);
  std::vector<PixelCoord> stack;
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      if (!g.at(col, row) || visited[g.index(col, row)]) continue;
      // Flood fill the component to count its pixels.
      std::size_t area = 0;
      stack.push_back({col, row});
      visited[g.index(col, row)] = 1;
      while (!stack.empty()) {
        const PixelCoord p = stack.back();
        stack.pop_back();
        ++area;
        for (const auto& d : kDirs) {
          const int c = p.col + d.col;
          const int r = p.row + d.row;
          if (g.contains(c, r) && g.at(c, r) && !visited[g.index(c, r)]) {
            visited[g.index(c, r)] = 1;
            stack.push_back({c, r});
          }
        }
      }
      contours.push_back({trace_outer(g, {col, row}, area), area});
    }
  }
  return contours;
}

std::vector<PixelCoord> region_pixels(const BinaryGrid& g) {
  std::vector<PixelCoord> px;
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      if (g.at(col, row)) px.push_back({col, row});
    }
  }
  return px;
}

BinaryGrid mask_union(std::span<const InstanceMask> masks, int width, int height) {
  BinaryGrid out(width, height, 0);
  for (const auto& m : masks) {
    if (!m.bitmap.same_shape(width, height)) {
      throw Error(ErrorCode::DimensionMismatch,
                  "mask " + std::to_string(m.id) + " is " + std::to_string(m.bitmap.width) + "x" +
                      std::to_string(m.bitmap.height) + ", frame is " + std::to_string(width) +
                      "x" + std::to_string(height));
    }
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] |= m.bitmap.data[i] ? 1 : 0;
  }
  return out;
}

}  // namespace seg3d
