#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spacedet/raster.hpp"
#include "spacedet/raster_io.hpp"
#include "testutil.hpp"

using namespace spacedet;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("resample at unit scale is the identity for every kernel") {
  const Frame src = testutil::random_frame(4, 4, 1, 11);
  for (const Kernel k : {Kernel::nearest, Kernel::bilinear, Kernel::bicubic}) {
    const Frame out = resample(src, 1.0, 1.0, k);
    REQUIRE(out.width == 4);
    REQUIRE(out.height == 4);
    CHECK(out.data == src.data);
  }
}

TEST_CASE("resample preserves constants") {
  const Frame src = Frame::constant(4, 4, 1, 0.7);
  const Frame up = resample(src, 1.0, 1.0, Kernel::bilinear);
  for (const double v : up.data) CHECK(v == 0.7);

  const Frame two = Frame::constant(2, 2, 1, 0.7);
  const Frame four = resample(two, 2.0, 2.0, Kernel::bilinear);
  REQUIRE(four.width == 4);
  REQUIRE(four.height == 4);
  for (const double v : four.data) CHECK(v == 0.7);

  const Frame cubic = resample(two, 2.0, 2.0, Kernel::bicubic);
  for (const double v : cubic.data) CHECK(v == doctest::Approx(0.7).epsilon(1e-13));
}

TEST_CASE("bicubic upscale of a ramp matches the closed-form Catmull-Rom values") {
  // 1x4 ramp upscaled x2 horizontally. Output sample j sits at source
  // coordinate (j + 0.5)/2 - 0.5; taps are Catmull-Rom weights with
  // clamp-to-edge, e.g. site 1 (src 0.25): w = {-0.0703125, 0.8671875,
  // 0.2265625, -0.0234375} on clamped taps {v0, v0, v1, v2} ->
  // 0.8671875*0 + 0.2265625/3 + (-0.0234375)*2/3 = 0.059895833...
  // Site 0 (src -0.25) evaluates to -0.0234375 and clamps to 0.
  Frame ramp;
  ramp.width = 4;
  ramp.height = 1;
  ramp.channels = 1;
  ramp.data = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};

  const Frame out = resample(ramp, 2.0, 1.0, Kernel::bicubic);
  REQUIRE(out.width == 8);
  REQUIRE(out.height == 1);
  const double expected[8] = {0.0,
                              0.059895833333333336,
                              0.2421875,
                              0.41666666666666669,
                              0.58333333333333326,
                              0.7578125,
                              0.94010416666666663,
                              1.0};
  for (int i = 0; i < 8; ++i) {
    CAPTURE(i);
    CHECK(std::abs(out.at(0, i) - expected[i]) < 1e-12);
  }
}

TEST_CASE("bilinear upscale of a ramp matches hand-computed weights") {
  Frame ramp;
  ramp.width = 4;
  ramp.height = 1;
  ramp.channels = 1;
  ramp.data = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};

  const Frame out = resample(ramp, 2.0, 1.0, Kernel::bilinear);
  const double expected[8] = {0.0,      1.0 / 12, 3.0 / 12, 5.0 / 12,
                              7.0 / 12, 9.0 / 12, 11.0 / 12, 1.0};
  for (int i = 0; i < 8; ++i) {
    CAPTURE(i);
    CHECK(std::abs(out.at(0, i) - expected[i]) < 1e-12);
  }
}

TEST_CASE("resample output dimensions use floor with a minimum of one") {
  const Frame src = testutil::random_frame(5, 5, 1, 3);
  const Frame half = resample(src, 0.5, 0.5, Kernel::nearest);
  CHECK(half.width == 2);
  CHECK(half.height == 2);
  const Frame tiny = resample(src, 0.19, 0.19, Kernel::bilinear);
  CHECK(tiny.width == 1);
  CHECK(tiny.height == 1);
}

TEST_CASE("resample rejects non-positive scales") {
  const Frame src = Frame::constant(2, 2, 1, 0.5);
  CHECK_THROWS_AS(resample(src, 0.0, 1.0, Kernel::bilinear), std::invalid_argument);
  CHECK_THROWS_AS(resample(src, 1.0, -2.0, Kernel::bilinear), std::invalid_argument);
}

TEST_CASE("resample clamps bicubic overshoot into [0,1]") {
  Frame step = Frame::constant(8, 1, 1, 0.0);
  for (int c = 4; c < 8; ++c) step.at(0, c) = 1.0;
  const Frame out = resample(step, 3.0, 1.0, Kernel::bicubic);
  for (const double v : out.data) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("resample_mask stays binary and follows floor dims") {
  const AlphaMask m = testutil::random_mask(7, 5, 0.4, 99);
  const AlphaMask out = resample_mask(m, 1.7, 2.3);
  CHECK(out.width == 11);
  CHECK(out.height == 11);
  for (const auto v : out.data) CHECK((v == 0 || v == 1));

  const AlphaMask ones = resample_mask(AlphaMask::full(3, 3), 3.0, 3.0);
  CHECK(ones.count() == 81);
}

TEST_CASE("rotate by zero is the identity") {
  const Frame src = testutil::random_frame(5, 3, 1, 17);
  const AlphaMask mask = testutil::random_mask(5, 3, 0.5, 18);
  const Rotated out = rotate(src, 0.0, 0.0, &mask);
  CHECK(out.frame.data == src.data);
  CHECK(out.alpha.data == mask.data);
}

TEST_CASE("rotate 2x2 by pi/2 counter-clockwise is the exact permutation") {
  Frame src;
  src.width = 2;
  src.height = 2;
  src.channels = 1;
  src.data = {1.0 / 16, 2.0 / 16, 3.0 / 16, 4.0 / 16};  // [[1,2],[3,4]] scaled

  const Rotated out = rotate(src, kPi / 2.0, 0.0);
  REQUIRE(out.frame.width == 2);
  REQUIRE(out.frame.height == 2);
  CHECK(out.frame.at(0, 0) == 2.0 / 16);
  CHECK(out.frame.at(0, 1) == 4.0 / 16);
  CHECK(out.frame.at(1, 0) == 1.0 / 16);
  CHECK(out.frame.at(1, 1) == 3.0 / 16);
}

TEST_CASE("rotating four times by pi/2 reproduces the input exactly") {
  const Frame src = testutil::random_frame(7, 5, 1, 23);
  const AlphaMask mask = testutil::random_mask(7, 5, 0.6, 24);
  Frame cur = src;
  AlphaMask cur_mask = mask;
  for (int i = 0; i < 4; ++i) {
    Rotated r = rotate(cur, kPi / 2.0, 0.0, &cur_mask);
    cur = std::move(r.frame);
    cur_mask = std::move(r.alpha);
  }
  CHECK(cur.data == src.data);
  CHECK(cur_mask.data == mask.data);
}

TEST_CASE("rotated disk keeps its pixel count within 2 percent") {
  // Inscribed disk (radius 5) in a 10x10 mask: 80 set pixels, verified by
  // direct rasterization of the circle equation.
  const int n = 10;
  const AlphaMask disk = testutil::disk_mask(n, 5.0);
  REQUIRE(disk.count() == 80);

  const Frame img = Frame::constant(n, n, 1, 1.0);
  const Rotated out = rotate(img, kPi / 4.0, 0.0, &disk);
  CHECK(out.frame.width == 15);
  CHECK(out.frame.height == 15);
  for (const auto v : out.alpha.data) CHECK((v == 0 || v == 1));

  const double in_count = static_cast<double>(disk.count());
  const double out_count = static_cast<double>(out.alpha.count());
  CHECK(std::abs(out_count - in_count) <= 0.02 * in_count);
}

TEST_CASE("rotate fills outside the source support and zeroes alpha there") {
  const Frame src = Frame::constant(4, 4, 1, 1.0);
  const Rotated out = rotate(src, kPi / 4.0, 0.25);
  // Canvas corners lie outside the rotated square.
  CHECK(out.alpha.at(0, 0) == 0);
  CHECK(out.frame.at(0, 0) == 0.25);
  // The canvas center is inside.
  CHECK(out.alpha.at(out.alpha.height / 2, out.alpha.width / 2) == 1);
}

TEST_CASE("composite with an empty alpha leaves the background untouched") {
  const Frame bg = testutil::random_frame(8, 8, 1, 31);
  Sprite sprite{Frame::constant(3, 3, 1, 0.9), AlphaMask::full(3, 3, 0), 1.0};
  const Frame out = composite(bg, sprite, 2, 2, BlendMode::multiply);
  CHECK(out.data == bg.data);
}

TEST_CASE("composite blend arithmetic") {
  const Frame bg = Frame::constant(4, 4, 1, 0.5);
  Sprite sprite{Frame::constant(2, 2, 1, 0.8), AlphaMask::full(2, 2, 1), 1.0};

  const Frame mult = composite(bg, sprite, 1, 1, BlendMode::multiply);
  CHECK(mult.at(1, 1) == 0.5 * 0.8);
  CHECK(mult.at(0, 0) == 0.5);

  const Frame repl = composite(bg, sprite, 1, 1, BlendMode::replace);
  CHECK(repl.at(1, 1) == 0.8);
  CHECK(repl.at(3, 3) == 0.5);
}

TEST_CASE("multiply mode never increases a pixel") {
  const Frame bg = testutil::random_frame(12, 12, 1, 41);
  Sprite sprite{testutil::random_frame(6, 6, 1, 42),
                testutil::random_mask(6, 6, 0.5, 43), 1.0};
  const Frame out = composite(bg, sprite, 3, 2, BlendMode::multiply);
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 12; ++c) {
      CHECK(out.at(r, c) <= bg.at(r, c));
      CHECK(out.at(r, c) >= 0.0);
    }
  }
}

TEST_CASE("composite rejects out-of-bounds placement") {
  const Frame bg = Frame::constant(4, 4, 1, 0.5);
  Sprite sprite{Frame::constant(3, 3, 1, 0.8), AlphaMask::full(3, 3, 1), 1.0};
  CHECK_THROWS_AS(composite(bg, sprite, 2, 2, BlendMode::replace), placement_error);
  CHECK_THROWS_AS(composite(bg, sprite, -1, 0, BlendMode::replace), placement_error);
}

TEST_CASE("composite rejects band mismatch") {
  const Frame bg = Frame::constant(4, 4, 3, 0.5, Band::RGB);
  Sprite sprite{Frame::constant(2, 2, 1, 0.8), AlphaMask::full(2, 2, 1), 1.0};
  CHECK_THROWS_AS(composite(bg, sprite, 0, 0, BlendMode::replace),
                  std::invalid_argument);
}

TEST_CASE("png 16-bit grayscale round trip is exact on the quantization grid") {
  const auto dir = testutil::scratch_dir("raster_io");
  Frame f = Frame::constant(6, 4, 1, 0.0);
  SplitMix64 rng(7);
  for (double& v : f.data) {
    v = static_cast<double>(rng.below(65536)) / 65535.0;  // representable levels
  }
  write_raster(dir / "gray16.png", f);
  const LoadedRaster back = read_raster(dir / "gray16.png");
  CHECK(back.bit_depth == 16);
  REQUIRE(back.frame.data.size() == f.data.size());
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    CHECK(back.frame.data[i] == doctest::Approx(f.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("tiff 16-bit and rgb 8-bit round trips") {
  const auto dir = testutil::scratch_dir("raster_io2");

  Frame mono = Frame::constant(5, 5, 1, 0.0);
  for (std::size_t i = 0; i < mono.data.size(); ++i) {
    mono.data[i] = static_cast<double>(i * 2621) / 65535.0;
  }
  write_raster(dir / "a.tiff", mono);
  const LoadedRaster tif = read_raster(dir / "a.tiff");
  CHECK(tif.bit_depth == 16);
  for (std::size_t i = 0; i < mono.data.size(); ++i) {
    CHECK(tif.frame.data[i] == doctest::Approx(mono.data[i]).epsilon(1e-12));
  }

  Frame rgb = Frame::constant(4, 3, 3, 0.0, Band::RGB);
  for (std::size_t i = 0; i < rgb.data.size(); ++i) {
    rgb.data[i] = static_cast<double>((i * 7) % 256) / 255.0;
  }
  write_raster(dir / "rgb.png", rgb);
  const LoadedRaster png = read_raster(dir / "rgb.png");
  CHECK(png.bit_depth == 8);
  CHECK(png.frame.channels == 3);
  CHECK(png.frame.band == Band::RGB);
  for (std::size_t i = 0; i < rgb.data.size(); ++i) {
    CHECK(png.frame.data[i] == doctest::Approx(rgb.data[i]).epsilon(1e-12));
  }

  std::filesystem::remove_all(dir);
}

TEST_CASE("reading a missing raster raises io_error") {
  CHECK_THROWS_AS(read_raster("/nonexistent/file.png"), io_error);
}
