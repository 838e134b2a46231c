#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spacedet/frame.hpp"

namespace spacedet {

/// Run-length encoded binary mask, column-major with runs alternating
/// 0s/1s and starting with the zero run (COCO uncompressed convention).
struct RleMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;
};

RleMask rle_encode(const AlphaMask& mask);
AlphaMask rle_decode(const RleMask& rle);
std::size_t rle_area(const RleMask& rle);

/// Bounding boxes are half-open pixel rectangles (x_min, y_min, x_max, y_max):
/// a mask whose set pixels span columns [c0, c1] gets x_min = c0, x_max = c1+1,
/// so single-pixel masks still satisfy x_min < x_max.
using BBox = std::array<double, 4>;

/// Tight bounds of the set pixels. Throws std::invalid_argument on an empty mask.
BBox mask_bbox(const AlphaMask& mask);
BBox rle_bbox(const RleMask& rle);

struct Annotation {
  int class_id = 0;
  BBox bbox{};
  RleMask mask;
  std::string image_id;
};

}  // namespace spacedet
