#pragma once

#include <filesystem>
#include <optional>

#include "spacedet/frame.hpp"

namespace spacedet {

struct LoadedRaster {
  Frame frame;
  std::optional<AlphaMask> alpha;  // present when the file carries an alpha channel
  int bit_depth = 8;               // source bit depth (8 or 16)
};

/// Reads PNG (8-bit gray/color, 16-bit gray) or TIFF (16-bit gray) rasters.
/// Intensities are normalized linearly to [0,1] from the source bit depth.
/// Throws io_error when the file is missing or undecodable.
LoadedRaster read_raster(const std::filesystem::path& path);

/// Writes `frame` by extension (.png or .tif/.tiff). Mono frames are written
/// as 16-bit, color frames as 8-bit; `bit_depth` of 8 or 16 overrides.
void write_raster(const std::filesystem::path& path, const Frame& frame,
                  int bit_depth = 0);

/// 8-bit PNG with 0/255 values.
void write_mask_png(const std::filesystem::path& path, const AlphaMask& mask);

}  // namespace spacedet
