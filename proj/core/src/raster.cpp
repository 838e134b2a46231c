#include "spacedet/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spacedet {

namespace {

constexpr double kPi = std::numbers::pi;

// Catmull-Rom cubic (Keys, a = -0.5). Evaluates to exactly 1 at t=0 and
// exactly 0 at integer |t| >= 1, which keeps unit-scale resampling lossless.
double catmull_rom(double t) {
  t = std::abs(t);
  if (t <= 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
  if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
  return 0.0;
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// One separable pass along a line of samples. `src(i)` fetches, `n` is the
// source length, `m` the output length. Pixel-center mapping: the realized
// ratio n/m places output sample j at source coordinate (j + 0.5) * n/m - 0.5.
template <typename Get, typename Put>
void resample_line(int n, int m, Kernel kernel, Get src, Put put) {
  const double ratio = static_cast<double>(n) / static_cast<double>(m);
  for (int j = 0; j < m; ++j) {
    const double pos = (j + 0.5) * ratio - 0.5;
    double value = 0.0;
    switch (kernel) {
      case Kernel::nearest: {
        const int i = clamp_index(static_cast<int>(std::floor(pos + 0.5)), n);
        value = src(i);
        break;
      }
      case Kernel::bilinear: {
        const int i0 = static_cast<int>(std::floor(pos));
        const double t = pos - i0;
        const double a = src(clamp_index(i0, n));
        const double b = src(clamp_index(i0 + 1, n));
        value = a + t * (b - a);
        break;
      }
      case Kernel::bicubic: {
        const int i0 = static_cast<int>(std::floor(pos));
        const double t = pos - i0;
        for (int k = -1; k <= 2; ++k) {
          value += catmull_rom(t - k) * src(clamp_index(i0 + k, n));
        }
        break;
      }
    }
    put(j, value);
  }
}

void check_scales(double scale_x, double scale_y) {
  if (!(scale_x > 0.0) || !(scale_y > 0.0) || !std::isfinite(scale_x) ||
      !std::isfinite(scale_y)) {
    throw std::invalid_argument("resample: scale factors must be positive");
  }
}

int scaled_dim(int dim, double scale) {
  return std::max(1, static_cast<int>(std::floor(dim * scale)));
}

}  // namespace

Frame resample_to(const Frame& src, int out_w, int out_h, Kernel kernel) {
  validate(src);
  if (out_w < 1 || out_h < 1) {
    throw std::invalid_argument("resample_to: output dimensions must be positive");
  }
  if (static_cast<double>(out_w) * out_h * src.channels > 4e9) {
    throw std::invalid_argument("resample: output dimensions too large");
  }
  const int ch = src.channels;

  // Horizontal pass into an intermediate (unclamped) buffer, then vertical.
  Frame mid;
  mid.width = out_w;
  mid.height = src.height;
  mid.channels = ch;
  mid.data.resize(static_cast<std::size_t>(out_w) * src.height * ch);
  for (int r = 0; r < src.height; ++r) {
    for (int c = 0; c < ch; ++c) {
      resample_line(
          src.width, out_w, kernel, [&](int i) { return src.at(r, i, c); },
          [&](int j, double v) { mid.at(r, j, c) = v; });
    }
  }

  Frame out;
  out.width = out_w;
  out.height = out_h;
  out.channels = ch;
  out.band = src.band;
  out.frame_index = src.frame_index;
  out.meta = src.meta;
  out.data.resize(static_cast<std::size_t>(out_w) * out_h * ch);
  for (int x = 0; x < out_w; ++x) {
    for (int c = 0; c < ch; ++c) {
      resample_line(
          src.height, out_h, kernel, [&](int i) { return mid.at(i, x, c); },
          [&](int j, double v) { out.at(j, x, c) = clamp01(v); });
    }
  }
  return out;
}

namespace {

struct Canvas {
  int width, height;
};

Canvas rotated_canvas(int w, int h, double theta) {
  const double ac = std::abs(std::cos(theta));
  const double as = std::abs(std::sin(theta));
  Canvas c;
  c.width = std::max(1, static_cast<int>(std::ceil(w * ac + h * as - 1e-9)));
  c.height = std::max(1, static_cast<int>(std::ceil(w * as + h * ac - 1e-9)));
  return c;
}

double normalize_angle(double theta) {
  theta = std::fmod(theta, 2.0 * kPi);
  if (theta < 0.0) theta += 2.0 * kPi;
  return theta;
}

// -1 if not a right-angle multiple, else k in {0,1,2,3} (count of ccw 90s).
int right_angle_multiple(double theta) {
  for (int k = 0; k < 4; ++k) {
    if (std::abs(theta - k * (kPi / 2.0)) < 1e-12) return k;
  }
  if (std::abs(theta - 2.0 * kPi) < 1e-12) return 0;
  return -1;
}

Rotated rotate_exact(const Frame& src, const AlphaMask& alpha, int k) {
  const int w = src.width, h = src.height, ch = src.channels;
  const bool swap = (k % 2) != 0;
  Rotated out;
  out.frame.width = swap ? h : w;
  out.frame.height = swap ? w : h;
  out.frame.channels = ch;
  out.frame.band = src.band;
  out.frame.frame_index = src.frame_index;
  out.frame.meta = src.meta;
  out.frame.data.resize(src.data.size());
  out.alpha.width = out.frame.width;
  out.alpha.height = out.frame.height;
  out.alpha.data.resize(alpha.data.size());

  for (int r = 0; r < out.frame.height; ++r) {
    for (int c = 0; c < out.frame.width; ++c) {
      int sr = 0, sc = 0;
      switch (k) {
        case 0: sr = r; sc = c; break;
        case 1: sr = c; sc = w - 1 - r; break;           // ccw 90
        case 2: sr = h - 1 - r; sc = w - 1 - c; break;   // 180
        case 3: sr = h - 1 - c; sc = r; break;           // ccw 270
      }
      for (int d = 0; d < ch; ++d) out.frame.at(r, c, d) = src.at(sr, sc, d);
      out.alpha.at(r, c) = alpha.at(sr, sc);
    }
  }
  return out;
}

double sample_kernel(const Frame& src, double xs, double ys, int c, Kernel kernel) {
  switch (kernel) {
    case Kernel::nearest: {
      const int xi = clamp_index(static_cast<int>(std::floor(xs + 0.5)), src.width);
      const int yi = clamp_index(static_cast<int>(std::floor(ys + 0.5)), src.height);
      return src.at(yi, xi, c);
    }
    case Kernel::bilinear: {
      const int x0 = static_cast<int>(std::floor(xs));
      const int y0 = static_cast<int>(std::floor(ys));
      const double tx = xs - x0, ty = ys - y0;
      const double v00 = src.at(clamp_index(y0, src.height), clamp_index(x0, src.width), c);
      const double v01 = src.at(clamp_index(y0, src.height), clamp_index(x0 + 1, src.width), c);
      const double v10 = src.at(clamp_index(y0 + 1, src.height), clamp_index(x0, src.width), c);
      const double v11 = src.at(clamp_index(y0 + 1, src.height), clamp_index(x0 + 1, src.width), c);
      const double top = v00 + tx * (v01 - v00);
      const double bot = v10 + tx * (v11 - v10);
      return top + ty * (bot - top);
    }
    case Kernel::bicubic: {
      const int x0 = static_cast<int>(std::floor(xs));
      const int y0 = static_cast<int>(std::floor(ys));
      const double tx = xs - x0, ty = ys - y0;
      double acc = 0.0;
      for (int ky = -1; ky <= 2; ++ky) {
        const double wy = catmull_rom(ty - ky);
        if (wy == 0.0) continue;
        double row = 0.0;
        for (int kx = -1; kx <= 2; ++kx) {
          row += catmull_rom(tx - kx) *
                 src.at(clamp_index(y0 + ky, src.height), clamp_index(x0 + kx, src.width), c);
        }
        acc += wy * row;
      }
      return acc;
    }
  }
  return 0.0;
}

}  // namespace

void validate(const Frame& frame) {
  if (frame.width <= 0 || frame.height <= 0) {
    throw std::invalid_argument("frame: empty dimensions");
  }
  if (frame.channels != 1 && frame.channels != 3) {
    throw std::invalid_argument("frame: channels must be 1 or 3");
  }
  if (frame.data.size() !=
      static_cast<std::size_t>(frame.width) * frame.height * frame.channels) {
    throw shape_error("frame: data length does not match width*height*channels");
  }
}

void validate(const Sprite& sprite) {
  validate(sprite.image);
  if (sprite.alpha.width != sprite.image.width ||
      sprite.alpha.height != sprite.image.height) {
    throw shape_error("sprite: alpha dimensions differ from image");
  }
  if (!(sprite.native_gsd_m > 0.0)) {
    throw std::invalid_argument("sprite: native_gsd_m must be positive");
  }
}

Frame resample(const Frame& src, double scale_x, double scale_y, Kernel kernel) {
  check_scales(scale_x, scale_y);
  return resample_to(src, scaled_dim(src.width, scale_x),
                     scaled_dim(src.height, scale_y), kernel);
}

AlphaMask resample_mask(const AlphaMask& src, double scale_x, double scale_y) {
  check_scales(scale_x, scale_y);
  if (src.empty()) throw std::invalid_argument("resample_mask: empty mask");
  const int out_w = scaled_dim(src.width, scale_x);
  const int out_h = scaled_dim(src.height, scale_y);
  AlphaMask out;
  out.width = out_w;
  out.height = out_h;
  out.data.resize(static_cast<std::size_t>(out_w) * out_h);
  const double rx = static_cast<double>(src.width) / out_w;
  const double ry = static_cast<double>(src.height) / out_h;
  for (int r = 0; r < out_h; ++r) {
    const int sr = clamp_index(static_cast<int>(std::floor((r + 0.5) * ry)), src.height);
    for (int c = 0; c < out_w; ++c) {
      const int sc = clamp_index(static_cast<int>(std::floor((c + 0.5) * rx)), src.width);
      out.at(r, c) = src.at(sr, sc) ? 1 : 0;
    }
  }
  return out;
}

std::pair<int, int> rotated_canvas_dims(int width, int height, double theta_rad) {
  const double theta = normalize_angle(theta_rad);
  const int k = right_angle_multiple(theta);
  if (k >= 0) {
    return (k % 2) ? std::pair{height, width} : std::pair{width, height};
  }
  const Canvas c = rotated_canvas(width, height, theta);
  return {c.width, c.height};
}

Rotated rotate(const Frame& src, double theta_rad, double fill,
               const AlphaMask* mask, Kernel kernel) {
  validate(src);
  if (mask && (mask->width != src.width || mask->height != src.height)) {
    throw shape_error("rotate: mask dimensions differ from frame");
  }
  fill = clamp01(fill);
  const double theta = normalize_angle(theta_rad);
  const AlphaMask alpha_in =
      mask ? *mask : AlphaMask::full(src.width, src.height);

  const int k = right_angle_multiple(theta);
  if (k >= 0) return rotate_exact(src, alpha_in, k);

  const Canvas canvas = rotated_canvas(src.width, src.height, theta);
  Rotated out;
  out.frame.width = canvas.width;
  out.frame.height = canvas.height;
  out.frame.channels = src.channels;
  out.frame.band = src.band;
  out.frame.frame_index = src.frame_index;
  out.frame.meta = src.meta;
  out.frame.data.resize(static_cast<std::size_t>(canvas.width) * canvas.height *
                        src.channels);
  out.alpha.width = canvas.width;
  out.alpha.height = canvas.height;
  out.alpha.data.resize(static_cast<std::size_t>(canvas.width) * canvas.height);

  const double cx_out = (canvas.width - 1) / 2.0;
  const double cy_out = (canvas.height - 1) / 2.0;
  const double cx_in = (src.width - 1) / 2.0;
  const double cy_in = (src.height - 1) / 2.0;
  const double ct = std::cos(theta), st = std::sin(theta);

  for (int r = 0; r < canvas.height; ++r) {
    for (int c = 0; c < canvas.width; ++c) {
      const double xo = c - cx_out, yo = r - cy_out;
      // Inverse map of a visually counter-clockwise rotation in raster
      // (y-down) coordinates.
      const double xs = xo * ct - yo * st + cx_in;
      const double ys = xo * st + yo * ct + cy_in;
      const int xi = static_cast<int>(std::floor(xs + 0.5));
      const int yi = static_cast<int>(std::floor(ys + 0.5));
      const bool inside =
          xi >= 0 && xi < src.width && yi >= 0 && yi < src.height;
      out.alpha.at(r, c) = inside ? (alpha_in.at(yi, xi) ? 1 : 0) : 0;
      for (int d = 0; d < src.channels; ++d) {
        out.frame.at(r, c, d) =
            inside ? clamp01(sample_kernel(src, xs, ys, d, kernel)) : fill;
      }
    }
  }
  return out;
}

Frame composite(const Frame& background, const Sprite& sprite, int left, int top,
                BlendMode mode) {
  validate(background);
  validate(sprite.image);
  if (sprite.alpha.width != sprite.image.width ||
      sprite.alpha.height != sprite.image.height) {
    throw shape_error("composite: sprite alpha dimensions differ from image");
  }
  if (background.channels != sprite.image.channels) {
    throw std::invalid_argument("composite: band/channel mismatch");
  }
  if (left < 0 || top < 0 || left + sprite.image.width > background.width ||
      top + sprite.image.height > background.height) {
    throw placement_error("composite: sprite exceeds frame bounds");
  }

  Frame out = background;
  for (int r = 0; r < sprite.image.height; ++r) {
    for (int c = 0; c < sprite.image.width; ++c) {
      if (!sprite.alpha.at(r, c)) continue;
      for (int d = 0; d < background.channels; ++d) {
        const double s = sprite.image.at(r, c, d);
        double v = (mode == BlendMode::replace)
                       ? s
                       : background.at(top + r, left + c, d) * s;
        out.at(top + r, left + c, d) = clamp01(v);
      }
    }
  }
  return out;
}

}  // namespace spacedet
