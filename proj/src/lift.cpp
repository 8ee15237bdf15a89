#include "seg3d/lift.hpp"

#include "seg3d/atomic_file.hpp"
#include "seg3d/error.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace seg3d {

namespace {

std::string size_str(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

void check_frame(const ColorImage& color, const DepthImage& depth, const CameraIntrinsics& k) {
  if (!color.same_shape(depth.samples)) {
    throw Error(ErrorCode::DimensionMismatch, "color is " + size_str(color.width, color.height) +
                                                  ", depth is " +
                                                  size_str(depth.width(), depth.height()));
  }
  if (!depth.samples.same_shape(k.width, k.height)) {
    throw Error(ErrorCode::DimensionMismatch, "frame is " + size_str(depth.width(), depth.height()) +
                                                  ", intrinsics are " + size_str(k.width, k.height));
  }
}

void check_mask(const BinaryGrid& mask, const DepthImage& depth, int id) {
  if (!mask.same_shape(depth.samples)) {
    throw Error(ErrorCode::DimensionMismatch,
                "mask " + std::to_string(id) + " is " + size_str(mask.width, mask.height) +
                    ", frame is " + size_str(depth.width(), depth.height()));
  }
}

// Runs fn(i) for i in [0, n); results must not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr first_error;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_' || c == '.';
    out += safe ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "object";
  return out;
}

}  // namespace

std::string_view to_string(OverlapPolicy p) noexcept {
  return p == OverlapPolicy::FirstWins ? "first_wins" : "duplicate";
}

bool SceneSegmentation::has_failures() const noexcept {
  return std::any_of(instances.begin(), instances.end(), [](const auto& i) { return !i.ok(); });
}

BinaryGrid select_instance_pixels(const DepthImage& depth, const BinaryGrid& mask,
                                  const LiftConfig& cfg, std::optional<DepthBand>* band_out) {
  check_mask(mask, depth, 0);
  if (cfg.band) {
    const DepthBand band = compute_band(depth, mask, *cfg.band);
    if (band_out) *band_out = band;
    return apply_band(depth, mask, band);
  }
  BinaryGrid kept(mask.width, mask.height, 0);
  bool any = false;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    kept.data[i] = mask.data[i] && depth.samples.data[i] != 0;
    any = any || kept.data[i];
  }
  if (!any) throw Error(ErrorCode::NoValidDepth, "no masked pixel has a valid depth");
  if (band_out) band_out->reset();
  return kept;
}

PointCloud lift_pixels(const ColorImage& color, const DepthImage& depth, const BinaryGrid& selected,
                       const CameraIntrinsics& k, DepthModel model) {
  PointCloud pc;
  pc.reserve(popcount(selected));
  for (int row = 0; row < selected.height; ++row) {
    for (int col = 0; col < selected.width; ++col) {
      if (!selected.at(col, row) || !depth.valid(col, row)) continue;
      pc.push_back(back_project(PixelCoord{col, row}, depth.millimeters(col, row), k, model),
                   color.at(col, row));
    }
  }
  return pc;
}

PointCloud lift_instance(const ColorImage& color, const DepthImage& depth, const InstanceMask& mask,
                         const CameraIntrinsics& k, const LiftConfig& cfg) {
  check_frame(color, depth, k);
  check_mask(mask.bitmap, depth, mask.id);
  const BinaryGrid kept = select_instance_pixels(depth, mask.bitmap, cfg);
  return lift_pixels(color, depth, kept, k, cfg.depth_model);
}

PointCloud lift_background(const ColorImage& color, const DepthImage& depth,
                           const BinaryGrid& kept_union, const CameraIntrinsics& k,
                           const LiftConfig& cfg) {
  check_frame(color, depth, k);
  check_mask(kept_union, depth, 0);
  BinaryGrid rest(kept_union.width, kept_union.height, 0);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    rest.data[i] = !kept_union.data[i] && depth.samples.data[i] != 0;
  }
  return lift_pixels(color, depth, rest, k, cfg.depth_model);
}

SceneSegmentation lift_scene(const ColorImage& color, const DepthImage& depth,
                             std::span<const InstanceMask> masks, const CameraIntrinsics& k,
                             const LiftConfig& cfg) {
  k.validate();
  if (cfg.band) cfg.band->validate();
  check_frame(color, depth, k);
  for (const auto& m : masks) check_mask(m.bitmap, depth, m.id);

  const std::size_t n = masks.size();
  SceneSegmentation seg;
  seg.instances.resize(n);
  std::vector<BinaryGrid> kept(n);

  // Band selection is independent per instance.
  parallel_for(n, [&](std::size_t i) {
    InstanceResult& r = seg.instances[i];
    r.id = masks[i].id;
    r.class_name = masks[i].class_name;
    r.score = masks[i].score;
    try {
      kept[i] = select_instance_pixels(depth, masks[i].bitmap, cfg, &r.band);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoValidDepth) throw;
      r.failure = e.what();
      kept[i] = BinaryGrid(depth.width(), depth.height(), 0);
    }
  });

  // Claims are resolved sequentially in manifest order.
  BinaryGrid claimed(depth.width(), depth.height(), 0);
  std::vector<BinaryGrid> emit(n);
  for (std::size_t i = 0; i < n; ++i) {
    const BinaryGrid& mask = masks[i].bitmap;
    InstanceStats& st = seg.instances[i].stats;
    emit[i] = BinaryGrid(mask.width, mask.height, 0);
    for (std::size_t p = 0; p < mask.size(); ++p) {
      if (!mask.data[p]) continue;
      ++st.masked;
      if (depth.samples.data[p] == 0) {
        ++st.invalid_depth;
      } else if (!kept[i].data[p]) {
        ++st.dropped_by_band;
      } else if (cfg.overlap_policy == OverlapPolicy::FirstWins && claimed.data[p]) {
        ++st.dropped_by_overlap;
      } else {
        ++st.kept;
        emit[i].data[p] = 1;
      }
    }
    for (std::size_t p = 0; p < mask.size(); ++p) claimed.data[p] |= kept[i].data[p];
  }

  parallel_for(n, [&](std::size_t i) {
    if (seg.instances[i].ok()) {
      seg.instances[i].cloud = lift_pixels(color, depth, emit[i], k, cfg.depth_model);
    }
  });

  if (cfg.emit_background) seg.background = lift_background(color, depth, claimed, k, cfg);
  return seg;
}

std::string instance_file_name(int id, std::string_view class_name) {
  return "instance_" + std::to_string(id) + "_" + sanitize(class_name) + ".ply";
}

std::string scene_report_json(const SceneSegmentation& seg, const LiftConfig& cfg,
                              const CameraIntrinsics& k, LengthUnit units) {
  using nlohmann::ordered_json;
  ordered_json j;
  ordered_json config;
  config["depth_model"] = to_string(cfg.depth_model);
  if (cfg.band) {
    config["band"] = {{"enabled", true},
                      {"center", to_string(cfg.band->center_mode)},
                      {"half_width_mm", cfg.band->half_width_mm}};
  } else {
    config["band"] = {{"enabled", false}};
  }
  config["emit_background"] = cfg.emit_background;
  config["overlap_policy"] = to_string(cfg.overlap_policy);
  config["units"] = units == LengthUnit::Meters ? "m" : "mm";
  j["config"] = std::move(config);
  j["intrinsics"] = ordered_json::parse(intrinsics_to_json(k));

  ordered_json instances = ordered_json::array();
  for (const auto& r : seg.instances) {
    ordered_json o;
    o["id"] = r.id;
    o["class_name"] = r.class_name;
    o["score"] = r.score;
    o["status"] = r.ok() ? "ok" : "failed";
    if (r.failure) o["error"] = *r.failure;
    o["file"] = r.ok() ? ordered_json(instance_file_name(r.id, r.class_name)) : ordered_json(nullptr);
    o["points"] = r.cloud.size();
    if (r.band) {
      o["band_mm"] = {{"center", r.band->center}, {"lo", r.band->lo}, {"hi", r.band->hi}};
    } else {
      o["band_mm"] = nullptr;
    }
    o["counts"] = {{"masked", r.stats.masked},
                   {"kept", r.stats.kept},
                   {"dropped_by_band", r.stats.dropped_by_band},
                   {"dropped_by_overlap", r.stats.dropped_by_overlap},
                   {"invalid_depth", r.stats.invalid_depth}};
    instances.push_back(std::move(o));
  }
  j["instances"] = std::move(instances);
  if (seg.background) {
    j["background"] = {{"file", "background.ply"}, {"points", seg.background->size()}};
  } else {
    j["background"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::vector<std::string> write_scene_outputs(const SceneSegmentation& seg, const LiftConfig& cfg,
                                             const CameraIntrinsics& k,
                                             const std::filesystem::path& out_dir,
                                             LengthUnit units) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::string> written;
  for (const auto& r : seg.instances) {
    if (!r.ok()) continue;
    const auto name = instance_file_name(r.id, r.class_name);
    export_ply(r.cloud, out_dir / name, units);
    written.push_back(name);
  }
  if (seg.background) {
    export_ply(*seg.background, out_dir / "background.ply", units);
    written.emplace_back("background.ply");
  }
  write_file_atomic(out_dir / "scene.json", scene_report_json(seg, cfg, k, units));
  written.emplace_back("scene.json");
  return written;
}

}  // namespace seg3d
