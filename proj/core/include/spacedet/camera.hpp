#pragma once

#include <utility>

#include "spacedet/frame.hpp"

namespace spacedet {

/// Observer optics: per-pixel angular resolution plus detector dimensions.
struct CameraModel {
  double ifov_rad = 0.0;
  int width_px = 0;
  int height_px = 0;
  Band band = Band::LWIR;
};

/// IFOV follows from orbit geometry: ifov = gsd / altitude.
CameraModel camera_from_orbit(double gsd_m, double altitude_m, int width_px,
                              int height_px, Band band = Band::LWIR);

/// Frame dimensions covering a physical crop extent at a given GSD
/// (floor arithmetic; a 100 km x 80 km crop at 156 m comes out 641 x 512).
std::pair<int, int> frame_dims_for_crop(double gsd_m, double crop_width_m,
                                        double crop_height_m);

/// Ratio of the sprite's native meters-per-pixel to the apparent
/// meters-per-pixel at range: native_gsd / (distance * ifov).
/// Strictly decreasing in distance.
double sprite_scale(double distance_m, const CameraModel& camera,
                    const Sprite& sprite);

}  // namespace spacedet
