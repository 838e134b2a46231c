#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spacedet/annotation.hpp"
#include "spacedet/camera.hpp"
#include "spacedet/raster.hpp"

namespace spacedet {

/// Everything needed to reproduce one composite bit-exactly.
struct SceneSpec {
  std::uint64_t seed = 0;
  std::uint64_t scene_index = 0;
  std::string background_id;
  std::string sprite_id;
  std::array<double, 2> crop_origin_m{0.0, 0.0};
  double distance_m = 0.0;
  double orientation_rad = 0.0;
  std::array<int, 2> position_px{0, 0};
  BlendMode blend = BlendMode::replace;
  double contrast_jitter = 1.0;
};

struct BackgroundAsset {
  std::string id;
  std::string path;
  double gsd_m = 0.0;       // meters per source pixel
  int width_px = 0;         // filled when the raster is loaded
  int height_px = 0;
};

struct SpriteAsset {
  std::string id;
  std::string path;
  std::string mask_path;    // optional; empty means derive alpha from the image
  double native_gsd_m = 0.0;
  int width_px = 0;
  int height_px = 0;
};

struct SceneGenConfig {
  double gsd_m = 156.0;
  double altitude_m = 456000.0;
  int width_px = 641;
  int height_px = 512;
  Band band = Band::LWIR;
  std::array<double, 2> distance_range_m{20.0, 150.0};
  double p_multiply = 0.5;
  std::array<double, 2> contrast_jitter_range{0.8, 1.2};
  Kernel resample_kernel = Kernel::bilinear;
  std::vector<BackgroundAsset> backgrounds;
  std::vector<SpriteAsset> sprites;
  std::uint64_t seed = 0;

  CameraModel camera() const {
    return camera_from_orbit(gsd_m, altitude_m, width_px, height_px, band);
  }
};

/// Canvas occupied by a sprite after scaling and rotation; shared between
/// placement sampling and rendering so both agree exactly.
std::pair<int, int> scaled_rotated_canvas(int sprite_w, int sprite_h,
                                          double scale, double theta_rad);

/// Draws one scene from the per-scene stream (master_seed, scene_index).
/// Identical arguments give a bit-identical SceneSpec regardless of call
/// order, which is what makes dataset generation worker-count independent.
/// Throws placement_error when the largest possible sprite canvas (at the
/// minimum configured distance) cannot fit in the frame.
SceneSpec sample_scene(std::uint64_t master_seed, std::uint64_t scene_index,
                       const SceneGenConfig& config);

/// Crop `source` at the spec's metric origin to the camera's physical extent
/// and resample to the camera frame dimensions.
Frame prepare_background(const Frame& source, double source_gsd_m,
                         const SceneSpec& spec, const SceneGenConfig& config);

/// Scale, rotate, jitter, and composite the sprite per `spec`; the annotation
/// mask is the rasterized alpha and the bbox its tight bounds.
std::pair<Frame, Annotation> render_scene(const SceneSpec& spec,
                                          const Frame& background,
                                          const Sprite& sprite,
                                          const CameraModel& camera,
                                          Kernel kernel = Kernel::bilinear);

struct SceneRecord {
  SceneSpec spec;
  Annotation annotation;
  std::string image_id;
  std::string image_path;
};

struct GeneratedDataset {
  std::vector<SceneRecord> records;
  std::vector<std::string> class_names;
  int frame_width = 0;
  int frame_height = 0;
};

/// Renders n_scenes composites to out_dir/images/NNNNNN.png and returns the
/// per-scene records in index order. Output is identical for any `jobs` count.
GeneratedDataset generate_dataset(const SceneGenConfig& config, int n_scenes,
                                  std::uint64_t master_seed,
                                  const std::filesystem::path& out_dir,
                                  int jobs = 1);

/// Loads a sprite raster; alpha comes from `mask_path` when set, else the
/// file's alpha channel, else any strictly positive intensity.
Sprite load_sprite(const SpriteAsset& asset);

}  // namespace spacedet
