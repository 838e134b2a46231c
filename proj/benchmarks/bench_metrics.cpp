#include <benchmark/benchmark.h>

#include "spacedet/metrics.hpp"
#include "spacedet/rng.hpp"

namespace {

using namespace spacedet;

void BM_pr_curve_and_ap(benchmark::State& state) {
  const int n_dets = static_cast<int>(state.range(0));
  SplitMix64 rng(9);
  std::vector<GroundTruthBox> gts;
  for (int g = 0; g < n_dets / 4; ++g) {
    const double x = rng.uniform(0, 500), y = rng.uniform(0, 500);
    gts.push_back({"i", 0, {x, y, x + 20, y + 20}});
  }
  std::vector<Detection> dets;
  for (int d = 0; d < n_dets; ++d) {
    const auto& g = gts[rng.below(gts.size())].bbox;
    const double jx = rng.uniform(-10, 10), jy = rng.uniform(-10, 10);
    dets.push_back({"i", 0, {g[0] + jx, g[1] + jy, g[2] + jx, g[3] + jy},
                    rng.uniform(), 0});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        average_precision(pr_curve(dets, gts, 0.5), ApInterp::points_101));
  }
}
BENCHMARK(BM_pr_curve_and_ap)->Arg(100)->Arg(1000);

void BM_miou_512(benchmark::State& state) {
  SplitMix64 rng(4);
  SegSample s;
  s.width = 512;
  s.height = 512;
  s.class_names = {"background", "body", "panel"};
  for (int i = 0; i < 512 * 512; ++i) {
    s.gt.push_back(static_cast<int>(rng.below(3)));
    s.pred.push_back(rng.uniform() < 0.9 ? s.gt.back()
                                         : static_cast<int>(rng.below(3)));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(miou(s));
  }
}
BENCHMARK(BM_miou_512);

}  // namespace
