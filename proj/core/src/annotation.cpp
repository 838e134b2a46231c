#include "spacedet/annotation.hpp"

#include <numeric>
#include <stdexcept>

namespace spacedet {

RleMask rle_encode(const AlphaMask& mask) {
  if (mask.empty()) throw std::invalid_argument("rle_encode: empty mask");
  RleMask rle;
  rle.height = mask.height;
  rle.width = mask.width;
  std::uint8_t current = 0;  // first run counts zeros
  std::uint32_t run = 0;
  for (int c = 0; c < mask.width; ++c) {
    for (int r = 0; r < mask.height; ++r) {
      const std::uint8_t v = mask.at(r, c) ? 1 : 0;
      if (v == current) {
        ++run;
      } else {
        rle.counts.push_back(run);
        current = v;
        run = 1;
      }
    }
  }
  rle.counts.push_back(run);
  return rle;
}

AlphaMask rle_decode(const RleMask& rle) {
  if (rle.height <= 0 || rle.width <= 0) {
    throw std::invalid_argument("rle_decode: empty dimensions");
  }
  const std::size_t total =
      static_cast<std::size_t>(rle.height) * rle.width;
  const std::size_t sum =
      std::accumulate(rle.counts.begin(), rle.counts.end(), std::size_t{0});
  if (sum != total) {
    throw shape_error("rle_decode: run counts do not cover height*width");
  }
  AlphaMask mask;
  mask.width = rle.width;
  mask.height = rle.height;
  mask.data.assign(total, 0);
  std::size_t pos = 0;
  std::uint8_t value = 0;
  for (const std::uint32_t run : rle.counts) {
    if (value) {
      for (std::uint32_t i = 0; i < run; ++i) {
        const std::size_t p = pos + i;
        const int c = static_cast<int>(p / rle.height);
        const int r = static_cast<int>(p % rle.height);
        mask.at(r, c) = 1;
      }
    }
    pos += run;
    value ^= 1;
  }
  return mask;
}

std::size_t rle_area(const RleMask& rle) {
  std::size_t area = 0;
  for (std::size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
  return area;
}

BBox mask_bbox(const AlphaMask& mask) {
  int r0 = mask.height, r1 = -1, c0 = mask.width, c1 = -1;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(r, c)) continue;
      r0 = std::min(r0, r);
      r1 = std::max(r1, r);
      c0 = std::min(c0, c);
      c1 = std::max(c1, c);
    }
  }
  if (r1 < 0) throw std::invalid_argument("mask_bbox: mask has no set pixels");
  return {static_cast<double>(c0), static_cast<double>(r0),
          static_cast<double>(c1 + 1), static_cast<double>(r1 + 1)};
}

BBox rle_bbox(const RleMask& rle) { return mask_bbox(rle_decode(rle)); }

}  // namespace spacedet
