#include "spacedet/scene.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

#include "spacedet/raster_io.hpp"
#include "spacedet/rng.hpp"

namespace spacedet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_config(const SceneGenConfig& config) {
  if (config.backgrounds.empty()) {
    throw std::invalid_argument("scenegen: no background assets configured");
  }
  if (config.sprites.empty()) {
    throw std::invalid_argument("scenegen: no sprite assets configured");
  }
  if (!(config.distance_range_m[0] > 0.0) ||
      !(config.distance_range_m[1] >= config.distance_range_m[0])) {
    throw std::invalid_argument("scenegen: invalid distance range");
  }
  if (config.p_multiply < 0.0 || config.p_multiply > 1.0) {
    throw std::invalid_argument("scenegen: p_multiply must be in [0,1]");
  }
  if (!(config.contrast_jitter_range[0] > 0.0) ||
      !(config.contrast_jitter_range[1] >= config.contrast_jitter_range[0])) {
    throw std::invalid_argument("scenegen: invalid contrast jitter range");
  }
}

int scaled_dim(int dim, double scale) {
  return std::max(1, static_cast<int>(std::floor(dim * scale)));
}

// Worst-case canvas is bounded by the scaled diagonal; checking it at the
// minimum distance makes placement feasibility a property of the config,
// not of the individual draw.
void check_fits_at_min_distance(const SpriteAsset& sprite,
                                const SceneGenConfig& config,
                                const CameraModel& camera) {
  const double s_min = sprite.native_gsd_m /
                       (config.distance_range_m[0] * camera.ifov_rad);
  const double diag = std::ceil(std::hypot(scaled_dim(sprite.width_px, s_min),
                                           scaled_dim(sprite.height_px, s_min)));
  if (diag > camera.width_px || diag > camera.height_px) {
    throw placement_error(
        "scenegen: sprite '" + sprite.id +
        "' too large to fit at minimum distance (needs " +
        std::to_string(static_cast<int>(diag)) + " px in a " +
        std::to_string(camera.width_px) + "x" +
        std::to_string(camera.height_px) + " frame)");
  }
}

AlphaMask alpha_from_intensity(const Frame& frame) {
  AlphaMask m = AlphaMask::full(frame.width, frame.height, 0);
  for (int r = 0; r < frame.height; ++r) {
    for (int c = 0; c < frame.width; ++c) {
      for (int ch = 0; ch < frame.channels; ++ch) {
        if (frame.at(r, c, ch) > 0.0) {
          m.at(r, c) = 1;
          break;
        }
      }
    }
  }
  return m;
}

}  // namespace

std::pair<int, int> scaled_rotated_canvas(int sprite_w, int sprite_h,
                                          double scale, double theta_rad) {
  return rotated_canvas_dims(scaled_dim(sprite_w, scale),
                             scaled_dim(sprite_h, scale), theta_rad);
}

SceneSpec sample_scene(std::uint64_t master_seed, std::uint64_t scene_index,
                       const SceneGenConfig& config) {
  check_config(config);
  const CameraModel camera = config.camera();

  SplitMix64 rng(SplitMix64::hash(master_seed, scene_index));

  // Draw order is part of the reproducibility contract; do not reorder.
  const auto& bg = config.backgrounds[rng.below(config.backgrounds.size())];
  const auto& sp = config.sprites[rng.below(config.sprites.size())];
  if (sp.width_px < 1 || sp.height_px < 1) {
    throw std::invalid_argument("scenegen: sprite '" + sp.id +
                                "' has unknown pixel dimensions");
  }
  if (!(sp.native_gsd_m > 0.0)) {
    throw std::invalid_argument("scenegen: sprite '" + sp.id +
                                "' has no native_gsd_m");
  }

  SceneSpec spec;
  spec.seed = master_seed;
  spec.scene_index = scene_index;
  spec.background_id = bg.id;
  spec.sprite_id = sp.id;
  spec.distance_m =
      rng.uniform(config.distance_range_m[0], config.distance_range_m[1]);
  spec.orientation_rad = rng.uniform(0.0, kTwoPi);
  spec.blend = rng.uniform() < config.p_multiply ? BlendMode::multiply
                                                 : BlendMode::replace;
  spec.contrast_jitter = rng.uniform(config.contrast_jitter_range[0],
                                     config.contrast_jitter_range[1]);

  const double crop_w_m = camera.width_px * config.gsd_m;
  const double crop_h_m = camera.height_px * config.gsd_m;
  const double bg_w_m = bg.width_px * bg.gsd_m;
  const double bg_h_m = bg.height_px * bg.gsd_m;
  spec.crop_origin_m[0] = rng.uniform(0.0, std::max(0.0, bg_w_m - crop_w_m));
  spec.crop_origin_m[1] = rng.uniform(0.0, std::max(0.0, bg_h_m - crop_h_m));

  check_fits_at_min_distance(sp, config, camera);
  const double scale =
      sp.native_gsd_m / (spec.distance_m * camera.ifov_rad);
  const auto [cw, ch] = scaled_rotated_canvas(sp.width_px, sp.height_px, scale,
                                              spec.orientation_rad);
  spec.position_px[0] = static_cast<int>(rng.below(camera.width_px - cw + 1));
  spec.position_px[1] = static_cast<int>(rng.below(camera.height_px - ch + 1));
  return spec;
}

Frame prepare_background(const Frame& source, double source_gsd_m,
                         const SceneSpec& spec, const SceneGenConfig& config) {
  validate(source);
  if (!(source_gsd_m > 0.0)) {
    throw std::invalid_argument("prepare_background: source gsd must be positive");
  }
  const double crop_w_m = config.width_px * config.gsd_m;
  const double crop_h_m = config.height_px * config.gsd_m;

  const int x0 = std::clamp(
      static_cast<int>(std::floor(spec.crop_origin_m[0] / source_gsd_m)), 0,
      source.width - 1);
  const int y0 = std::clamp(
      static_cast<int>(std::floor(spec.crop_origin_m[1] / source_gsd_m)), 0,
      source.height - 1);
  const int cw = std::clamp(
      static_cast<int>(std::llround(crop_w_m / source_gsd_m)), 1,
      source.width - x0);
  const int chh = std::clamp(
      static_cast<int>(std::llround(crop_h_m / source_gsd_m)), 1,
      source.height - y0);

  Frame crop;
  crop.width = cw;
  crop.height = chh;
  crop.channels = source.channels;
  crop.band = source.band;
  crop.data.resize(static_cast<std::size_t>(cw) * chh * source.channels);
  for (int r = 0; r < chh; ++r) {
    for (int c = 0; c < cw; ++c) {
      for (int ch = 0; ch < source.channels; ++ch) {
        crop.at(r, c, ch) = source.at(y0 + r, x0 + c, ch);
      }
    }
  }
  return resample_to(crop, config.width_px, config.height_px,
                     config.resample_kernel);
}

std::pair<Frame, Annotation> render_scene(const SceneSpec& spec,
                                          const Frame& background,
                                          const Sprite& sprite,
                                          const CameraModel& camera,
                                          Kernel kernel) {
  validate(background);
  validate(sprite);
  if (background.width != camera.width_px ||
      background.height != camera.height_px) {
    throw shape_error("render_scene: background does not match camera frame dims");
  }

  const double scale = sprite_scale(spec.distance_m, camera, sprite);
  Frame scaled = resample(sprite.image, scale, scale, kernel);
  AlphaMask scaled_alpha = resample_mask(sprite.alpha, scale, scale);
  Rotated rot = rotate(scaled, spec.orientation_rad, 0.0, &scaled_alpha, kernel);

  if (spec.contrast_jitter != 1.0) {
    for (double& v : rot.frame.data) {
      v = std::clamp(v * spec.contrast_jitter, 0.0, 1.0);
    }
  }

  Sprite placed{std::move(rot.frame), std::move(rot.alpha), sprite.native_gsd_m};
  Frame out = composite(background, placed, spec.position_px[0],
                        spec.position_px[1], spec.blend);

  AlphaMask full = AlphaMask::full(background.width, background.height, 0);
  for (int r = 0; r < placed.alpha.height; ++r) {
    for (int c = 0; c < placed.alpha.width; ++c) {
      if (placed.alpha.at(r, c)) {
        full.at(spec.position_px[1] + r, spec.position_px[0] + c) = 1;
      }
    }
  }
  if (full.count() == 0) {
    throw placement_error("render_scene: rendered sprite mask is empty");
  }

  Annotation ann;
  ann.class_id = 0;
  ann.mask = rle_encode(full);
  ann.bbox = mask_bbox(full);
  return {std::move(out), std::move(ann)};
}

Sprite load_sprite(const SpriteAsset& asset) {
  if (!(asset.native_gsd_m > 0.0)) {
    throw std::invalid_argument("load_sprite: sprite '" + asset.id +
                                "' has no native_gsd_m");
  }
  LoadedRaster loaded = read_raster(asset.path);
  Sprite sprite;
  sprite.native_gsd_m = asset.native_gsd_m;
  sprite.image = std::move(loaded.frame);
  if (!asset.mask_path.empty()) {
    LoadedRaster mask = read_raster(asset.mask_path);
    if (mask.frame.width != sprite.image.width ||
        mask.frame.height != sprite.image.height) {
      throw shape_error("load_sprite: mask dimensions differ from image: " +
                        asset.mask_path);
    }
    sprite.alpha = alpha_from_intensity(mask.frame);
  } else if (loaded.alpha) {
    sprite.alpha = std::move(*loaded.alpha);
  } else {
    sprite.alpha = alpha_from_intensity(sprite.image);
  }
  return sprite;
}

GeneratedDataset generate_dataset(const SceneGenConfig& config, int n_scenes,
                                  std::uint64_t master_seed,
                                  const std::filesystem::path& out_dir,
                                  int jobs) {
  if (n_scenes < 1) {
    throw std::invalid_argument("generate_dataset: n_scenes must be >= 1");
  }
  check_config(config);

  // Load every asset once up front; workers share the read-only maps.
  SceneGenConfig cfg = config;
  std::map<std::string, Frame> backgrounds;
  std::map<std::string, Sprite> sprites;
  for (auto& bg : cfg.backgrounds) {
    LoadedRaster loaded = read_raster(bg.path);
    bg.width_px = loaded.frame.width;
    bg.height_px = loaded.frame.height;
    if (!(bg.gsd_m > 0.0)) bg.gsd_m = cfg.gsd_m;
    backgrounds.emplace(bg.id, std::move(loaded.frame));
  }
  for (auto& sp : cfg.sprites) {
    Sprite sprite = load_sprite(sp);
    sp.width_px = sprite.image.width;
    sp.height_px = sprite.image.height;
    sprites.emplace(sp.id, std::move(sprite));
  }

  const CameraModel camera = cfg.camera();
  std::filesystem::create_directories(out_dir / "images");

  std::vector<SceneRecord> records(n_scenes);
  std::atomic<int> next_index{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (true) {
      const int i = next_index.fetch_add(1);
      if (i >= n_scenes || failed.load()) break;
      try {
        SceneSpec spec = sample_scene(master_seed, i, cfg);
        const auto bg_gsd = [&] {
          for (const auto& b : cfg.backgrounds) {
            if (b.id == spec.background_id) return b.gsd_m;
          }
          throw io_error("generate_dataset: unknown background " +
                         spec.background_id);
        }();
        Frame background = prepare_background(backgrounds.at(spec.background_id),
                                              bg_gsd, spec, cfg);
        auto [frame, ann] = render_scene(spec, background,
                                         sprites.at(spec.sprite_id), camera,
                                         cfg.resample_kernel);
        char name[16];
        std::snprintf(name, sizeof(name), "%06d", i);
        SceneRecord& rec = records[i];
        rec.spec = spec;
        rec.image_id = name;
        rec.image_path = std::string("images/") + name + ".png";
        ann.image_id = rec.image_id;
        rec.annotation = std::move(ann);
        write_raster(out_dir / rec.image_path, frame);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        break;
      }
    }
  };

  const int n_workers = std::clamp(jobs, 1, 64);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  GeneratedDataset out;
  out.records = std::move(records);
  out.class_names = {"spacecraft"};
  out.frame_width = camera.width_px;
  out.frame_height = camera.height_px;
  return out;
}

}  // namespace spacedet
