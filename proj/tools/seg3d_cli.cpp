// seg3d: lift instance masks on aligned RGB-D frames into per-object point clouds.
//
// Exit codes: 0 success, 2 usage or validation error, 3 some instances failed
// to lift (remaining outputs are still written).

#include "seg3d/error.hpp"
#include "seg3d/lift.hpp"
#include "seg3d/masks.hpp"
#include "seg3d/pointcloud.hpp"
#include "seg3d/rgbd_io.hpp"
#include "seg3d/synth.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitPartial = 3;

struct LiftArgs {
  std::string scene;
  std::string color, depth, intrinsics, masks;
  std::string out;
  std::string depth_model = "planar";
  std::string band_center = "median";
  double band_half_width = 300.0;
  bool no_band = false;
  bool no_background = false;
  std::string overlap = "first-wins";
  std::string units = "mm";
};

struct MeasureArgs {
  std::string cloud;
  std::string axis;
  double trim = 0.0;
  std::string units = "mm";
};

struct CameraArgs {
  std::string intrinsics;
  double fx = 600.0, fy = 600.0, cx = 320.0, cy = 240.0;
  int width = 640, height = 480;
  double depth_scale = 1.0;

  seg3d::CameraIntrinsics resolve() const {
    if (!intrinsics.empty()) return seg3d::load_intrinsics(intrinsics);
    seg3d::CameraIntrinsics k{fx, fy, cx, cy, width, height, depth_scale};
    k.validate();
    return k;
  }
};

struct SynthArgs {
  CameraArgs camera;
  std::string out;
  std::string depth_model = "planar";
  double background_mm = 2500.0;
  double jitter_mm = 0.0;
  std::uint64_t seed = 0;
  int id = 1;
  std::string class_name;
  // box
  double width_mm = 0.0, height_mm = 0.0, depth_mm = 0.0, offset_x_mm = 0.0, offset_y_mm = 0.0;
  // sphere
  double radius_mm = 0.0, center_x_mm = 0.0, center_y_mm = 0.0, center_z_mm = 0.0;
};

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

int report(const seg3d::Error& e) {
  std::cerr << "seg3d: " << e.what() << "\n";
  return kExitInvalid;
}

int cmd_lift(const LiftArgs& a) {
  try {
    fs::path color_path, depth_path, intr_path, masks_path;
    if (!a.scene.empty()) {
      const fs::path dir(a.scene);
      color_path = dir / "color.png";
      depth_path = dir / "depth.png";
      intr_path = dir / "intrinsics.json";
      masks_path = dir / "manifest.json";
    } else {
      if (a.color.empty() || a.depth.empty() || a.intrinsics.empty() || a.masks.empty()) {
        std::cerr << "seg3d lift: either --scene or all of --color, --depth, --intrinsics, --masks "
                     "are required\n";
        return kExitInvalid;
      }
      color_path = a.color;
      depth_path = a.depth;
      intr_path = a.intrinsics;
      masks_path = a.masks;
    }

    seg3d::LiftConfig cfg;
    cfg.depth_model = seg3d::parse_depth_model(a.depth_model);
    if (a.no_band) {
      cfg.band.reset();
    } else {
      cfg.band = seg3d::BandConfig{seg3d::parse_band_center(a.band_center), a.band_half_width};
      cfg.band->validate();
    }
    cfg.emit_background = !a.no_background;
    cfg.overlap_policy = a.overlap == "duplicate" ? seg3d::OverlapPolicy::Duplicate
                                                  : seg3d::OverlapPolicy::FirstWins;
    const auto units = seg3d::parse_length_unit(a.units);

    const auto k = seg3d::load_intrinsics(intr_path);
    const auto color = seg3d::load_color(color_path);
    const auto depth = seg3d::load_depth(depth_path, k);
    seg3d::validate_alignment(color, depth);
    const auto loaded = seg3d::load_manifest(masks_path);

    const auto seg = seg3d::lift_scene(color, depth, loaded.masks, k, cfg);
    seg3d::write_scene_outputs(seg, cfg, k, a.out, units);

    for (const auto& r : seg.instances) {
      if (!r.ok()) std::cerr << "seg3d lift: instance " << r.id << " failed: " << *r.failure << "\n";
    }
    return seg.has_failures() ? kExitPartial : kExitOk;
  } catch (const seg3d::Error& e) {
    return report(e);
  }
}

int cmd_measure(const MeasureArgs& a) {
  try {
    const auto axis = seg3d::parse_axis(a.axis);
    const auto units = seg3d::parse_length_unit(a.units);
    const auto cloud = seg3d::import_ply(a.cloud);
    auto r = seg3d::measure_extent(cloud, axis, a.trim);
    if (units == seg3d::LengthUnit::Meters) r.extent *= 1000.0;
    char extent[64];
    std::snprintf(extent, sizeof extent, "%.3f", r.extent);
    std::cout << "axis=" << seg3d::to_string(r.axis) << " extent_mm=" << extent
              << " points=" << r.point_count << " trim=" << format_number(r.trim_fraction) << "\n";
    return kExitOk;
  } catch (const seg3d::Error& e) {
    return report(e);
  }
}

int cmd_synth(const SynthArgs& a, bool sphere) {
  try {
    const auto k = a.camera.resolve();
    const auto model = seg3d::parse_depth_model(a.depth_model);
    const seg3d::DepthJitter jitter{a.jitter_mm, a.seed};
    if (a.jitter_mm < 0.0) throw seg3d::Error(seg3d::ErrorCode::InvalidArgument, "jitter must be >= 0");
    seg3d::SynthScene scene;
    if (sphere) {
      seg3d::SphereSpec s;
      s.center = {a.center_x_mm, a.center_y_mm, a.center_z_mm};
      s.radius_mm = a.radius_mm;
      s.id = a.id;
      if (!a.class_name.empty()) s.class_name = a.class_name;
      scene = seg3d::render_sphere(s, k, a.background_mm, model, jitter);
    } else {
      seg3d::BoxFaceSpec b;
      b.width_mm = a.width_mm;
      b.height_mm = a.height_mm;
      b.center_depth_mm = a.depth_mm;
      b.offset_x_mm = a.offset_x_mm;
      b.offset_y_mm = a.offset_y_mm;
      b.id = a.id;
      if (!a.class_name.empty()) b.class_name = a.class_name;
      scene = seg3d::render_box(b, k, a.background_mm, model, jitter);
    }
    seg3d::write_scene(scene, a.out);
    return kExitOk;
  } catch (const seg3d::Error& e) {
    return report(e);
  }
}

void add_camera_options(CLI::App* app, CameraArgs& c) {
  auto* file = app->add_option("--intrinsics", c.intrinsics, "Intrinsics JSON file")->check(CLI::ExistingFile);
  for (auto* opt : {app->add_option("--fx", c.fx, "Focal length x, pixels")->capture_default_str(),
                    app->add_option("--fy", c.fy, "Focal length y, pixels")->capture_default_str(),
                    app->add_option("--cx", c.cx, "Principal point column")->capture_default_str(),
                    app->add_option("--cy", c.cy, "Principal point row")->capture_default_str(),
                    app->add_option("--image-width", c.width, "Image columns")->capture_default_str(),
                    app->add_option("--image-height", c.height, "Image rows")->capture_default_str(),
                    app->add_option("--depth-scale", c.depth_scale, "Millimeters per depth unit")
                        ->capture_default_str()}) {
    opt->excludes(file);
  }
}

void add_synth_common(CLI::App* app, SynthArgs& s) {
  add_camera_options(app, s.camera);
  app->add_option("--out", s.out, "Output scene directory")->required();
  app->add_option("--depth-model", s.depth_model, "Depth convention written to depth.png")
      ->check(CLI::IsMember({"planar", "ray"}))
      ->capture_default_str();
  app->add_option("--background-mm", s.background_mm, "Background plane depth")->capture_default_str();
  app->add_option("--jitter-mm", s.jitter_mm, "Uniform depth noise half-range")->capture_default_str();
  app->add_option("--seed", s.seed, "Jitter seed")->capture_default_str();
  app->add_option("--id", s.id, "Instance id")->capture_default_str();
  app->add_option("--class-name", s.class_name, "Instance class label");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lift 2D instance masks on aligned RGB-D frames into 3D point clouds"};
  app.require_subcommand(1);

  LiftArgs lift;
  auto* lift_cmd = app.add_subcommand("lift", "Lift every instance of a frame into point clouds");
  auto* scene_opt = lift_cmd->add_option("--scene", lift.scene,
                                         "Directory with color.png, depth.png, intrinsics.json, manifest.json");
  for (auto* opt : {lift_cmd->add_option("--color", lift.color, "8-bit RGB(A) PNG"),
                    lift_cmd->add_option("--depth", lift.depth, "16-bit depth PNG"),
                    lift_cmd->add_option("--intrinsics", lift.intrinsics, "Intrinsics JSON"),
                    lift_cmd->add_option("--masks", lift.masks, "Mask manifest JSON")}) {
    opt->excludes(scene_opt);
  }
  lift_cmd->add_option("--out", lift.out, "Output directory")->required();
  lift_cmd->add_option("--depth-model", lift.depth_model, "Depth convention of depth.png")
      ->check(CLI::IsMember({"planar", "ray"}))
      ->capture_default_str();
  auto* no_band = lift_cmd->add_flag("--no-band", lift.no_band, "Disable depth band filtering");
  lift_cmd->add_option("--band-center", lift.band_center, "Band center statistic")
      ->check(CLI::IsMember({"median", "mean"}))
      ->capture_default_str()
      ->excludes(no_band);
  lift_cmd->add_option("--band-halfwidth-mm", lift.band_half_width, "Band half-width")
      ->check(CLI::PositiveNumber)
      ->capture_default_str()
      ->excludes(no_band);
  lift_cmd->add_flag("--no-background", lift.no_background, "Skip background.ply");
  lift_cmd->add_option("--overlap", lift.overlap, "Overlapping mask policy")
      ->check(CLI::IsMember({"first-wins", "duplicate"}))
      ->capture_default_str();
  lift_cmd->add_option("--units", lift.units, "PLY coordinate units")
      ->check(CLI::IsMember({"mm", "m"}))
      ->capture_default_str();

  MeasureArgs measure;
  auto* measure_cmd = app.add_subcommand("measure", "Report the trimmed extent of a PLY cloud along an axis");
  measure_cmd->add_option("--cloud", measure.cloud, "ASCII PLY file")->required();
  measure_cmd->add_option("--axis", measure.axis, "x, y or z")
      ->required()
      ->check(CLI::IsMember({"x", "y", "z", "X", "Y", "Z"}));
  measure_cmd->add_option("--trim", measure.trim, "Fraction dropped from each tail, in [0, 0.5)")
      ->check(CLI::Range(0.0, 0.4999999))
      ->capture_default_str();
  measure_cmd->add_option("--units", measure.units, "Units the PLY was written in")
      ->check(CLI::IsMember({"mm", "m"}))
      ->capture_default_str();

  SynthArgs box, sphere;
  auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic RGB-D scene with exact ground truth");
  synth_cmd->require_subcommand(1);
  auto* box_cmd = synth_cmd->add_subcommand("box", "Fronto-parallel rectangle in front of a wall");
  add_synth_common(box_cmd, box);
  box_cmd->add_option("--width-mm", box.width_mm, "Face width")->required();
  box_cmd->add_option("--height-mm", box.height_mm, "Face height")->required();
  box_cmd->add_option("--depth-mm", box.depth_mm, "Face depth")->required();
  box_cmd->add_option("--offset-x-mm", box.offset_x_mm, "Face center x")->capture_default_str();
  box_cmd->add_option("--offset-y-mm", box.offset_y_mm, "Face center y")->capture_default_str();
  auto* sphere_cmd = synth_cmd->add_subcommand("sphere", "Sphere in front of a wall");
  add_synth_common(sphere_cmd, sphere);
  sphere_cmd->add_option("--radius-mm", sphere.radius_mm, "Radius")->required();
  sphere_cmd->add_option("--center-x-mm", sphere.center_x_mm, "Center x")->capture_default_str();
  sphere_cmd->add_option("--center-y-mm", sphere.center_y_mm, "Center y")->capture_default_str();
  sphere_cmd->add_option("--center-z-mm", sphere.center_z_mm, "Center z")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "seg3d: " << e.what() << "\n";
    return kExitInvalid;
  }

  if (*lift_cmd) return cmd_lift(lift);
  if (*measure_cmd) return cmd_measure(measure);
  if (*box_cmd) return cmd_synth(box, false);
  if (*sphere_cmd) return cmd_synth(sphere, true);
  return kExitInvalid;
}
