#include "spacedet/raster_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>

namespace spacedet {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

bool is_tiff(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".tif" || ext == ".tiff";
}

}  // namespace

LoadedRaster read_raster(const std::filesystem::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) {
    throw io_error("cannot read raster: " + path.string());
  }

  const int depth = m.depth();
  if (depth != CV_8U && depth != CV_16U) {
    throw io_error("unsupported bit depth in " + path.string());
  }
  const double scale = depth == CV_8U ? 1.0 / 255.0 : 1.0 / 65535.0;
  const int in_ch = m.channels();
  if (in_ch != 1 && in_ch != 3 && in_ch != 4) {
    throw io_error("unsupported channel count in " + path.string());
  }

  LoadedRaster out;
  out.bit_depth = depth == CV_8U ? 8 : 16;
  Frame& f = out.frame;
  f.width = m.cols;
  f.height = m.rows;
  f.channels = in_ch == 1 ? 1 : 3;
  f.band = f.channels == 1 ? Band::LWIR : Band::RGB;
  f.data.resize(static_cast<std::size_t>(f.width) * f.height * f.channels);
  if (in_ch == 4) {
    out.alpha = AlphaMask::full(f.width, f.height, 0);
  }

  auto px = [&](int r, int c, int ch) -> double {
    return depth == CV_8U ? m.ptr<std::uint8_t>(r)[c * in_ch + ch]
                          : m.ptr<std::uint16_t>(r)[c * in_ch + ch];
  };

  for (int r = 0; r < f.height; ++r) {
    for (int c = 0; c < f.width; ++c) {
      if (in_ch == 1) {
        f.at(r, c) = px(r, c, 0) * scale;
      } else {
        // OpenCV stores BGR(A); Frame stores RGB.
        f.at(r, c, 0) = px(r, c, 2) * scale;
        f.at(r, c, 1) = px(r, c, 1) * scale;
        f.at(r, c, 2) = px(r, c, 0) * scale;
        if (in_ch == 4) {
          out.alpha->at(r, c) = px(r, c, 3) * scale >= 0.5 ? 1 : 0;
        }
      }
    }
  }
  return out;
}

void write_raster(const std::filesystem::path& path, const Frame& frame,
                  int bit_depth) {
  validate(frame);
  if (bit_depth == 0) bit_depth = frame.channels == 1 ? 16 : 8;
  if (bit_depth != 8 && bit_depth != 16) {
    throw std::invalid_argument("write_raster: bit depth must be 8 or 16");
  }
  if (is_tiff(path) && (frame.channels != 1 || bit_depth != 16)) {
    throw std::invalid_argument("write_raster: TIFF output is 16-bit grayscale only");
  }

  const int type = bit_depth == 8 ? CV_8UC(frame.channels == 1 ? 1 : 3)
                                  : CV_16UC(frame.channels == 1 ? 1 : 3);
  cv::Mat m(frame.height, frame.width, type);
  const double scale = bit_depth == 8 ? 255.0 : 65535.0;
  for (int r = 0; r < frame.height; ++r) {
    for (int c = 0; c < frame.width; ++c) {
      for (int ch = 0; ch < frame.channels; ++ch) {
        // Frame is RGB; OpenCV wants BGR.
        const int src_ch = frame.channels == 1 ? 0 : 2 - ch;
        const double v = std::round(clamp01(frame.at(r, c, src_ch)) * scale);
        if (bit_depth == 8) {
          m.ptr<std::uint8_t>(r)[c * frame.channels + ch] =
              static_cast<std::uint8_t>(v);
        } else {
          m.ptr<std::uint16_t>(r)[c * frame.channels + ch] =
              static_cast<std::uint16_t>(v);
        }
      }
    }
  }

  std::filesystem::create_directories(path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path());
  if (!cv::imwrite(path.string(), m)) {
    throw io_error("cannot write raster: " + path.string());
  }
}

void write_mask_png(const std::filesystem::path& path, const AlphaMask& mask) {
  if (mask.empty()) throw std::invalid_argument("write_mask_png: empty mask");
  cv::Mat m(mask.height, mask.width, CV_8UC1);
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      m.ptr<std::uint8_t>(r)[c] = mask.at(r, c) ? 255 : 0;
    }
  }
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? std::filesystem::path(".")
                                          : path.parent_path());
  if (!cv::imwrite(path.string(), m)) {
    throw io_error("cannot write mask: " + path.string());
  }
}

}  // namespace spacedet
