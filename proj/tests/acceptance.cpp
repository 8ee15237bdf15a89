// Acceptance suite: one PASS/FAIL line per criterion; exit status is nonzero
// if any criterion fails.

#include "seg3d/atomic_file.hpp"
#include "seg3d/error.hpp"
#include "seg3d/lift.hpp"
#include "seg3d/masks.hpp"
#include "seg3d/pointcloud.hpp"
#include "seg3d/rgbd_io.hpp"
#include "seg3d/synth.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>

using namespace seg3d;
namespace fs = std::filesystem;
using seg3d::testing::TempDir;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

std::string fmt(double v, int digits = 3) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// --- Object extents at desk scale -----------------------------------------------

Outcome object_extents() {
  struct Fixture {
    const char* name;
    double width, height;
  };
  // Everyday objects: book, bottle, cup and a wall clock diameter;
  // heights exercise the y axis.
  const Fixture fixtures[] = {{"book", 203, 260}, {"bottle", 126, 245}, {"cup", 76, 95}, {"clock", 228, 228}};
  constexpr double kDepth = 1000.0;
  constexpr double kFocal = 600.0;
  const double tol = 2.0 * kDepth / kFocal;
  TempDir dir;
  std::ostringstream detail;
  bool pass = true;
  double slowest = 0.0;
  for (const auto& f : fixtures) {
    const auto scene = dir / (std::string(f.name) + "_scene");
    const auto out = dir / (std::string(f.name) + "_out");
    const auto t0 = std::chrono::steady_clock::now();
    const int synth = testing::run_command(
        testing::cli() + " synth box --width-mm " + fmt(f.width, 0) + " --height-mm " + fmt(f.height, 0) +
        " --depth-mm 1000 --fx 600 --fy 600 --cx 320 --cy 240 --image-width 640 --image-height 480 --class-name " +
        f.name + " --out " + q(scene)).exit_code;
    const int lift = testing::run_command(testing::cli() + " lift --scene " + q(scene) + " --out " + q(out)).exit_code;
    const auto ply = out / instance_file_name(1, f.name);
    const auto mx = testing::run_command(testing::cli() + " measure --cloud " + q(ply) + " --axis x");
    const auto my = testing::run_command(testing::cli() + " measure --cloud " + q(ply) + " --axis y");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    slowest = std::max(slowest, secs);

    std::smatch m;
    double ex = NAN, ey = NAN;
    if (std::regex_search(mx.output, m, std::regex(R"(extent_mm=([0-9.]+))"))) ex = std::stod(m[1]);
    if (std::regex_search(my.output, m, std::regex(R"(extent_mm=([0-9.]+))"))) ey = std::stod(m[1]);
    const bool ok = synth == 0 && lift == 0 && mx.exit_code == 0 && my.exit_code == 0 &&
                    std::abs(ex - f.width) <= tol && std::abs(ey - f.height) <= tol && secs < 1.0;
    pass = pass && ok;
    detail << f.name << " w " << fmt(ex) << "/" << f.width << " h " << fmt(ey) << "/" << f.height << "; ";
  }
  detail << "tol +-" << fmt(tol) << " mm, slowest scene " << fmt(slowest) << " s (< 1 s)";
  return {pass, detail.str()};
}

// --- Perspective back-projection round trip ----------------------------------

Outcome projection_round_trip() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    CameraIntrinsics k;
    k.fx = std::uniform_real_distribution<double>(200.0, 2000.0)(rng);
    k.fy = std::uniform_real_distribution<double>(200.0, 2000.0)(rng);
    k.width = std::uniform_int_distribution<int>(32, 1920)(rng);
    k.height = std::uniform_int_distribution<int>(24, 1080)(rng);
    k.cx = std::uniform_real_distribution<double>(0.0, k.width - 1)(rng);
    k.cy = std::uniform_real_distribution<double>(0.0, k.height - 1)(rng);
    const PixelCoord p{std::uniform_int_distribution<int>(0, k.width - 1)(rng),
                       std::uniform_int_distribution<int>(0, k.height - 1)(rng)};
    const double d = std::uniform_real_distribution<double>(200.0, 5000.0)(rng);
    for (auto m : {DepthModel::PlanarZ, DepthModel::RayDistance}) {
      const Point3 pt = back_project(p, d, k, m);
      const ImagePoint ip = project(pt, k, m);
      const Point3 again = back_project(ip.col, ip.row, ip.depth, k, m);
      const double pix_err = std::hypot(ip.col - p.col, ip.row - p.row) /
                             std::max(1.0, std::hypot(double(p.col), double(p.row)));
      const double d_err = std::abs(ip.depth - d) / d;
      const double pt_err = std::hypot(again.x - pt.x, again.y - pt.y, again.z - pt.z) /
                            std::hypot(pt.x, pt.y, pt.z);
      worst = std::max({worst, pix_err, d_err, pt_err});
    }
  }
  return {worst <= 1e-9, "10000 samples x 2 models, worst relative error " + sci(worst) + " (<= 1e-9)"};
}

// --- Depth-model discrimination ----------------------------------------------

double max_radial_residual(const PointCloud& pc, const Point3& c, double r) {
  double worst = 0.0;
  for (const auto& p : pc.points) worst = std::max(worst, std::abs(std::hypot(p.x - c.x, p.y - c.y, p.z - c.z) - r));
  return worst;
}

Outcome depth_model_discrimination() {
  const CameraIntrinsics k = testing::default_camera();
  SphereSpec sp;
  sp.center = {150, -40, 1000};
  sp.radius_mm = 150;
  TempDir dir;
  write_scene(render_sphere(sp, k, 2500, DepthModel::RayDistance), dir.path());

  const auto k2 = load_intrinsics(dir / "intrinsics.json");
  const auto color = load_color(dir / "color.png");
  const auto depth = load_depth(dir / "depth.png", k2);
  const auto masks = load_manifest(dir / "manifest.json").masks;
  LiftConfig cfg;
  cfg.depth_model = DepthModel::RayDistance;
  const double ray = max_radial_residual(lift_instance(color, depth, masks[0], k2, cfg), sp.center, sp.radius_mm);
  cfg.depth_model = DepthModel::PlanarZ;
  const double planar = max_radial_residual(lift_instance(color, depth, masks[0], k2, cfg), sp.center, sp.radius_mm);
  // 1 mm plus half a depth unit of rounding.
  const double bound = 1.0 + 0.5 * k2.depth_scale;
  return {ray <= bound && planar > bound, "ray residual " + fmt(ray) + " mm <= " + fmt(bound) +
                                              ", planar residual " + fmt(planar) + " mm > " + fmt(bound)};
}

// --- Partition -----------------------------------------------------------------

Outcome partition() {
  std::mt19937 rng(77);
  const CameraIntrinsics k = testing::default_camera();
  std::size_t total_points = 0;
  for (int scene = 0; scene < 50; ++scene) {
    BoxFaceSpec spec;
    spec.width_mm = std::uniform_real_distribution<double>(30, 300)(rng);
    spec.height_mm = std::uniform_real_distribution<double>(30, 300)(rng);
    spec.center_depth_mm = std::uniform_real_distribution<double>(800, 1500)(rng);
    spec.offset_x_mm = std::uniform_real_distribution<double>(-100, 100)(rng);
    spec.offset_y_mm = std::uniform_real_distribution<double>(-60, 60)(rng);
    const DepthModel model = scene % 2 ? DepthModel::RayDistance : DepthModel::PlanarZ;
    SynthScene s = render_box(spec, k, 2500, model);
    // Extra rectangular instances that may overlap each other and the box.
    const int extra = std::uniform_int_distribution<int>(0, 4)(rng);
    for (int e = 0; e < extra; ++e) {
      InstanceMask m;
      m.id = e + 2;
      m.class_name = "extra";
      m.bitmap = BinaryGrid(k.width, k.height, 0);
      const int c0 = std::uniform_int_distribution<int>(0, 500)(rng), r0 = std::uniform_int_distribution<int>(0, 380)(rng);
      const int cw = std::uniform_int_distribution<int>(5, 140)(rng), rh = std::uniform_int_distribution<int>(5, 100)(rng);
      for (int r = r0; r < r0 + rh; ++r)
        for (int c = c0; c < c0 + cw; ++c) m.bitmap.at(c, r) = 1;
      s.masks.push_back(std::move(m));
    }
    // Dropouts.
    std::bernoulli_distribution dropout(0.05);
    for (auto& v : s.depth.samples.data)
      if (dropout(rng)) v = 0;

    LiftConfig cfg;
    cfg.band.reset();
    cfg.depth_model = model;
    const auto seg = lift_scene(s.color, s.depth, s.masks, k, cfg);
    std::vector<std::uint8_t> seen(s.depth.samples.size(), 0);
    std::size_t points = 0;
    auto visit = [&](const PointCloud& pc) {
      for (const auto& p : pc.points) {
        const ImagePoint ip = project(p, k, model);
        const int c = static_cast<int>(std::lround(ip.col)), r = static_cast<int>(std::lround(ip.row));
        if (!s.depth.samples.contains(c, r)) return false;
        auto& slot = seen[s.depth.samples.index(c, r)];
        if (slot) return false;
        slot = 1;
        ++points;
      }
      return true;
    };
    for (const auto& inst : seg.instances)
      if (!visit(inst.cloud)) return {false, "scene " + std::to_string(scene) + ": pixel in two clouds"};
    if (!visit(*seg.background)) return {false, "scene " + std::to_string(scene) + ": pixel in two clouds"};
    const auto valid = static_cast<std::size_t>(
        std::count_if(s.depth.samples.data.begin(), s.depth.samples.data.end(), [](auto v) { return v != 0; }));
    if (points != valid) {
      return {false, "scene " + std::to_string(scene) + ": " + std::to_string(points) + " points vs " +
                         std::to_string(valid) + " valid pixels"};
    }
    total_points += points;
  }
  return {true, "50 scenes, " + std::to_string(total_points) + " points, each valid pixel in exactly one cloud"};
}

// --- Band rejection ------------------------------------------------------------

Outcome band_rejection() {
  const CameraIntrinsics k = testing::default_camera();
  BoxFaceSpec spec;
  spec.width_mm = 203;
  spec.height_mm = 260;
  spec.center_depth_mm = 1000;
  SynthScene s = render_box(spec, k, 2500, DepthModel::PlanarZ);
  // Dilate by 4 pixels (square structuring element) into the 2500 mm wall.
  const BinaryGrid face = s.masks[0].bitmap;
  BinaryGrid grown = face;
  for (int r = 0; r < k.height; ++r)
    for (int c = 0; c < k.width; ++c)
      for (int dr = -4; dr <= 4; ++dr)
        for (int dc = -4; dc <= 4; ++dc)
          if (face.contains(c + dc, r + dr) && face.at(c + dc, r + dr)) grown.at(c, r) = 1;
  s.masks[0].bitmap = grown;
  std::set<std::size_t> wall;
  for (std::size_t i = 0; i < grown.size(); ++i)
    if (grown.data[i] && !face.data[i] && s.depth.samples.data[i] == 2500) wall.insert(i);

  const auto seg = lift_scene(s.color, s.depth, s.masks, k, LiftConfig{});
  auto pixels_of = [&](const PointCloud& pc) {
    std::set<std::size_t> px;
    for (const auto& p : pc.points) {
      const ImagePoint ip = project(p, k, DepthModel::PlanarZ);
      px.insert(s.depth.samples.index(static_cast<int>(std::lround(ip.col)), static_cast<int>(std::lround(ip.row))));
    }
    return px;
  };
  const auto inst = pixels_of(seg.instances[0].cloud);
  const auto bg = pixels_of(*seg.background);
  std::size_t absent = 0, present = 0;
  for (auto i : wall) {
    absent += !inst.count(i);
    present += bg.count(i);
  }
  const bool pass = !wall.empty() && absent == wall.size() && present == wall.size();
  return {pass, std::to_string(wall.size()) + " wall pixels in dilated mask: " + std::to_string(absent) +
                    " absent from instance, " + std::to_string(present) + " in background"};
}

// --- Contour oracle ------------------------------------------------------------

Outcome contour_oracle() {
  std::mt19937 rng(100);
  for (int i = 0; i < 100; ++i) {
    const int w = std::uniform_int_distribution<int>(1, 32)(rng);
    const int h = std::uniform_int_distribution<int>(1, 32)(rng);
    const double density = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const BinaryGrid g = testing::random_mask(rng, w, h, density);
    std::vector<std::size_t> areas;
    for (const auto& c : find_contours(g)) areas.push_back(c.enclosed_area);
    auto oracle = testing::component_sizes_union_find(g);
    std::sort(areas.begin(), areas.end());
    std::sort(oracle.begin(), oracle.end());
    if (areas != oracle) return {false, "mask " + std::to_string(i) + " disagrees with the component oracle"};
  }
  return {true, "100 random masks up to 32x32: per-component areas and sums match 8-connected union-find"};
}

// --- PLY round trip --------------------------------------------------------------

Outcome ply_round_trip() {
  TempDir dir;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-5000.0, 5000.0);
  std::uniform_int_distribution<int> byte(0, 255);
  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{100000}}) {
    PointCloud pc;
    for (std::size_t i = 0; i < n; ++i) {
      pc.push_back({coord(rng), coord(rng), std::abs(coord(rng)) + 1.0},
                   Rgb{static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)),
                       static_cast<std::uint8_t>(byte(rng))});
    }
    export_ply(pc, dir / "c.ply");
    const PointCloud back = import_ply(dir / "c.ply");
    if (back.size() != n || back.colors != pc.colors) return {false, "count or colors differ at n=" + std::to_string(n)};
    for (std::size_t i = 0; i < n; ++i) {
      const Point3& a = pc.points[i];
      const Point3& b = back.points[i];
      if (b.x != double(float(a.x)) || b.y != double(float(a.y)) || b.z != double(float(a.z))) {
        return {false, "coordinate beyond float32 rounding at index " + std::to_string(i)};
      }
    }
  }
  return {true, "0, 1 and 100000 points: order, count and colors exact; coordinates equal float32 rounding"};
}

// --- Determinism -----------------------------------------------------------------

Outcome determinism() {
  TempDir dir;
  const auto scene = dir / "scene";
  if (testing::run_command(testing::cli() + " synth sphere --radius-mm 120 --center-x-mm 40 --center-z-mm 1100 "
                                             "--depth-model ray --jitter-mm 5 --seed 9 --out " + q(scene)).exit_code != 0) {
    return {false, "synth failed"};
  }
  for (const char* out : {"a", "b"}) {
    if (testing::run_command(testing::cli() + " lift --depth-model ray --scene " + q(scene) + " --out " + q(dir / out)).exit_code != 0) {
      return {false, "lift failed"};
    }
  }
  std::set<std::string> a_names, b_names;
  for (const auto& e : fs::directory_iterator(dir / "a")) a_names.insert(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(dir / "b")) b_names.insert(e.path().filename().string());
  if (a_names != b_names) return {false, "output trees list different files"};
  for (const auto& name : a_names) {
    if (read_file_bytes(dir / "a" / name) != read_file_bytes(dir / "b" / name)) return {false, name + " differs"};
  }
  return {true, std::to_string(a_names.size()) + " files byte-identical across two lift runs"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"object-extents", object_extents},
      {"projection-round-trip", projection_round_trip},
      {"depth-model-discrimination", depth_model_discrimination},
      {"partition", partition},
      {"band-rejection", band_rejection},
      {"contour-oracle", contour_oracle},
      {"ply-round-trip", ply_round_trip},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << "\n";
  }
  std::cout << (failures ? std::to_string(failures) + " criteria failed\n" : "all criteria passed\n");
  return failures ? 1 : 0;
}
