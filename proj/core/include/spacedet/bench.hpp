#pragma once

#include <functional>
#include <string>

#include "spacedet/frame.hpp"

namespace spacedet {

struct BenchInputSpec {
  int width = 832;
  int height = 832;
  int channels = 3;
};

struct BenchReport {
  int n_passes = 0;
  int warmup_passes = 0;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  BenchInputSpec input;
};

using Predictor = std::function<void(const Frame&)>;

/// Times n_passes predictor calls on a fixed synthetic input with a monotonic
/// clock, after `warmup` unrecorded passes. Statistics cover the timed passes
/// only. A predictor that throws aborts the run with the failing pass index.
BenchReport run_benchmark(const Predictor& predictor, BenchInputSpec input,
                          int n_passes = 500, int warmup = 10);

std::string report_to_json(const BenchReport& report);

}  // namespace spacedet
