#include "spacedet/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "spacedet/rng.hpp"

namespace spacedet {

namespace {

using clock_type = std::chrono::steady_clock;

// Linear-interpolation percentile over the sorted sample.
double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

}  // namespace

BenchReport run_benchmark(const Predictor& predictor, BenchInputSpec input,
                          int n_passes, int warmup) {
  if (n_passes < 1) {
    throw std::invalid_argument("run_benchmark: n_passes must be >= 1");
  }
  if (warmup < 0) {
    throw std::invalid_argument("run_benchmark: warmup must be >= 0");
  }
  if (input.width < 1 || input.height < 1 ||
      (input.channels != 1 && input.channels != 3)) {
    throw std::invalid_argument("run_benchmark: bad input spec");
  }

  Frame image;
  image.width = input.width;
  image.height = input.height;
  image.channels = input.channels;
  image.band = input.channels == 1 ? Band::LWIR : Band::RGB;
  image.data.resize(static_cast<std::size_t>(input.width) * input.height *
                    input.channels);
  SplitMix64 rng(SplitMix64::hash(0xbe7cULL, 0));
  for (double& v : image.data) v = rng.uniform();

  auto run_pass = [&](int pass, bool warm) {
    try {
      predictor(image);
    } catch (const std::exception& e) {
      throw std::runtime_error("run_benchmark: predictor failed at " +
                               std::string(warm ? "warmup" : "timed") +
                               " pass " + std::to_string(pass) + ": " + e.what());
    }
  };

  for (int i = 0; i < warmup; ++i) run_pass(i, true);

  std::vector<double> ms(n_passes);
  for (int i = 0; i < n_passes; ++i) {
    const auto t0 = clock_type::now();
    run_pass(i, false);
    const auto t1 = clock_type::now();
    ms[i] = std::chrono::duration<double, std::milli>(t1 - t0).count();
  }

  std::vector<double> sorted = ms;
  std::sort(sorted.begin(), sorted.end());

  BenchReport report;
  report.n_passes = n_passes;
  report.warmup_passes = warmup;
  report.input = input;
  report.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / n_passes;
  report.min_ms = sorted.front();
  report.max_ms = sorted.back();
  report.p50_ms = percentile(sorted, 0.50);
  report.p95_ms = percentile(sorted, 0.95);
  return report;
}

std::string report_to_json(const BenchReport& report) {
  nlohmann::json j{{"n_passes", report.n_passes},
                   {"warmup_passes", report.warmup_passes},
                   {"mean_ms", report.mean_ms},
                   {"p50_ms", report.p50_ms},
                   {"p95_ms", report.p95_ms},
                   {"min_ms", report.min_ms},
                   {"max_ms", report.max_ms},
                   {"input",
                    {{"width", report.input.width},
                     {"height", report.input.height},
                     {"channels", report.input.channels}}}};
  return j.dump(2) + "\n";
}

}  // namespace spacedet
