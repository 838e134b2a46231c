#pragma once

#include <utility>

#include "spacedet/frame.hpp"

namespace spacedet {

enum class Kernel { nearest, bilinear, bicubic };

enum class BlendMode { replace, multiply };

/// Separable resampling. Output dims are max(1, floor(dim * scale)).
/// Sampling uses pixel-center alignment with clamp-to-edge taps; the bicubic
/// kernel is Catmull-Rom (Keys, a = -0.5). Output is clamped to [0,1].
/// scale of exactly 1 reproduces the input bit-for-bit for every kernel.
Frame resample(const Frame& src, double scale_x, double scale_y, Kernel kernel);

/// Resample to explicit output dimensions (same sampling rules as resample).
Frame resample_to(const Frame& src, int out_width, int out_height, Kernel kernel);

/// Nearest-neighbor mask resampling; output stays binary.
AlphaMask resample_mask(const AlphaMask& src, double scale_x, double scale_y);

struct Rotated {
  Frame frame;
  AlphaMask alpha;
};

/// Canvas dimensions rotate() will produce for a w x h input at theta.
std::pair<int, int> rotated_canvas_dims(int width, int height, double theta_rad);

/// Rotate counter-clockwise about the image center onto a canvas sized to the
/// rotated bounding box. Inverse mapping with the requested kernel; `fill`
/// outside source support. The alpha channel (the source support mask, or
/// `mask` when given) is rotated with nearest-neighbor so it stays binary.
/// Angles that are exact multiples of 90 degrees take a lossless index
/// permutation path.
Rotated rotate(const Frame& src, double theta_rad, double fill,
               const AlphaMask* mask = nullptr, Kernel kernel = Kernel::bilinear);

/// Paste `sprite` onto `background` with its top-left corner at (left, top).
/// Pixels outside the sprite's alpha support are untouched. replace writes the
/// sprite value; multiply writes background * sprite (both normalized),
/// clamped to [0,1]. The sprite must fit entirely inside the background.
Frame composite(const Frame& background, const Sprite& sprite, int left, int top,
                BlendMode mode);

}  // namespace spacedet
