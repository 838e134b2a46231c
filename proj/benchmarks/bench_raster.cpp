#include <benchmark/benchmark.h>

#include "spacedet/raster.hpp"
#include "spacedet/rng.hpp"

namespace {

using namespace spacedet;

Frame random_frame(int w, int h, std::uint64_t seed) {
  Frame f = Frame::constant(w, h, 1, 0.0);
  SplitMix64 rng(seed);
  for (double& v : f.data) v = rng.uniform();
  return f;
}

void BM_resample_bilinear(benchmark::State& state) {
  const Frame src = random_frame(800, 640, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(resample_to(src, 641, 512, Kernel::bilinear));
  }
}
BENCHMARK(BM_resample_bilinear);

void BM_resample_bicubic(benchmark::State& state) {
  const Frame src = random_frame(800, 640, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(resample_to(src, 641, 512, Kernel::bicubic));
  }
}
BENCHMARK(BM_resample_bicubic);

void BM_rotate_bilinear(benchmark::State& state) {
  const Frame src = random_frame(128, 128, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rotate(src, 0.7, 0.0));
  }
}
BENCHMARK(BM_rotate_bilinear);

void BM_composite_multiply(benchmark::State& state) {
  const Frame bg = random_frame(641, 512, 3);
  Sprite sprite{random_frame(96, 96, 4), AlphaMask::full(96, 96, 1), 0.02};
  for (auto _ : state) {
    benchmark::DoNotOptimize(composite(bg, sprite, 100, 100, BlendMode::multiply));
  }
}
BENCHMARK(BM_composite_multiply);

}  // namespace
