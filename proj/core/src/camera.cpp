#include "spacedet/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace spacedet {

CameraModel camera_from_orbit(double gsd_m, double altitude_m, int width_px,
                              int height_px, Band band) {
  if (!(gsd_m > 0.0) || !(altitude_m > 0.0)) {
    throw std::invalid_argument("camera_from_orbit: gsd and altitude must be positive");
  }
  if (width_px < 1 || height_px < 1) {
    throw std::invalid_argument("camera_from_orbit: detector dimensions must be positive");
  }
  return CameraModel{gsd_m / altitude_m, width_px, height_px, band};
}

std::pair<int, int> frame_dims_for_crop(double gsd_m, double crop_width_m,
                                        double crop_height_m) {
  if (!(gsd_m > 0.0) || !(crop_width_m > 0.0) || !(crop_height_m > 0.0)) {
    throw std::invalid_argument("frame_dims_for_crop: arguments must be positive");
  }
  const int w = static_cast<int>(std::floor(crop_width_m / gsd_m));
  const int h = static_cast<int>(std::floor(crop_height_m / gsd_m));
  if (w < 1 || h < 1) {
    throw std::invalid_argument("frame_dims_for_crop: crop smaller than one pixel");
  }
  return {w, h};
}

double sprite_scale(double distance_m, const CameraModel& camera,
                    const Sprite& sprite) {
  if (!(distance_m > 0.0)) {
    throw std::invalid_argument("sprite_scale: distance must be positive");
  }
  if (!(camera.ifov_rad > 0.0)) {
    throw std::invalid_argument("sprite_scale: camera ifov must be positive");
  }
  if (!(sprite.native_gsd_m > 0.0)) {
    throw std::invalid_argument("sprite_scale: sprite native_gsd_m must be positive");
  }
  return sprite.native_gsd_m / (distance_m * camera.ifov_rad);
}

}  // namespace spacedet
