#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spacedet/error.hpp"

namespace spacedet {

enum class Band { LWIR, RGB };

/// 2-D raster with intensities normalized to [0,1], row-major, channel-last.
/// Mono rasters have channels == 1 (LWIR), color rasters channels == 3 (RGB).
struct Frame {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> data;
  Band band = Band::LWIR;
  int frame_index = 0;
  std::map<std::string, std::string> meta;

  bool empty() const { return width <= 0 || height <= 0; }

  double& at(int row, int col, int ch = 0) {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }
  double at(int row, int col, int ch = 0) const {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }

  static Frame constant(int width, int height, int channels, double value,
                        Band band = Band::LWIR) {
    Frame f;
    f.width = width;
    f.height = height;
    f.channels = channels;
    f.band = band;
    f.data.assign(static_cast<std::size_t>(width) * height * channels, value);
    return f;
  }
};

/// Binary per-pixel mask, same row-major layout as Frame (single channel).
struct AlphaMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  bool empty() const { return width <= 0 || height <= 0; }

  std::uint8_t& at(int row, int col) {
    return data[static_cast<std::size_t>(row) * width + col];
  }
  std::uint8_t at(int row, int col) const {
    return data[static_cast<std::size_t>(row) * width + col];
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : data) n += (v != 0);
    return n;
  }

  static AlphaMask full(int width, int height, std::uint8_t value = 1) {
    AlphaMask m;
    m.width = width;
    m.height = height;
    m.data.assign(static_cast<std::size_t>(width) * height, value);
    return m;
  }
};

/// Foreground cutout: image plus binary support mask and the physical
/// resolution of the source capture (meters per pixel).
struct Sprite {
  Frame image;
  AlphaMask alpha;
  double native_gsd_m = 0.0;
};

/// Throws shape_error / std::invalid_argument when invariants are broken.
void validate(const Frame& frame);
void validate(const Sprite& sprite);

}  // namespace spacedet
