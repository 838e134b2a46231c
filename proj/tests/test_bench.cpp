#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "spacedet/bench.hpp"
#include "testutil.hpp"

using namespace spacedet;

namespace {

void check_ordering(const BenchReport& r) {
  CHECK(r.min_ms <= r.p50_ms);
  CHECK(r.p50_ms <= r.p95_ms);
  CHECK(r.p95_ms <= r.max_ms);
  CHECK(r.mean_ms >= r.min_ms);
  CHECK(r.mean_ms <= r.max_ms);
}

}  // namespace

TEST_CASE("no-op predictor produces a well-formed sub-millisecond report") {
  const BenchReport r = run_benchmark([](const Frame&) {}, {64, 64, 1}, 50, 5);
  CHECK(r.n_passes == 50);
  CHECK(r.warmup_passes == 5);
  CHECK(r.mean_ms < 1.0);
  check_ordering(r);
  CHECK(r.input.width == 64);
}

TEST_CASE("a 10 ms stub lands in the 10-13 ms band") {
  const auto stub = [](const Frame&) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  };
  const BenchReport r = run_benchmark(stub, {32, 32, 1}, 50, 3);
  CHECK(r.mean_ms >= 10.0);
  CHECK(r.mean_ms <= 13.0);
  check_ordering(r);
}

TEST_CASE("warmup passes are excluded from the statistics") {
  // First five calls are 10x slower; with warmup=5 the report must reflect
  // only the steady state.
  auto calls = std::make_shared<std::atomic<int>>(0);
  const auto staged = [calls](const Frame&) {
    const int n = calls->fetch_add(1);
    std::this_thread::sleep_for(std::chrono::milliseconds(n < 5 ? 20 : 2));
  };
  const BenchReport r = run_benchmark(staged, {32, 32, 1}, 30, 5);
  CHECK(r.mean_ms >= 2.0);
  CHECK(r.mean_ms < 6.0);
  CHECK(r.max_ms < 15.0);
  check_ordering(r);
}

TEST_CASE("percentile ordering holds for uneven latencies") {
  auto calls = std::make_shared<std::atomic<int>>(0);
  const auto uneven = [calls](const Frame&) {
    const int n = calls->fetch_add(1);
    std::this_thread::sleep_for(std::chrono::milliseconds(n % 3));
  };
  const BenchReport r = run_benchmark(uneven, {16, 16, 1}, 24, 0);
  check_ordering(r);
}

TEST_CASE("bench argument validation and predictor failure reporting") {
  CHECK_THROWS_AS(run_benchmark([](const Frame&) {}, {16, 16, 1}, 0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_benchmark([](const Frame&) {}, {0, 16, 1}, 10, 0),
                  std::invalid_argument);

  auto calls = std::make_shared<std::atomic<int>>(0);
  const auto failing = [calls](const Frame&) {
    if (calls->fetch_add(1) == 7) throw std::runtime_error("boom");
  };
  CHECK_THROWS_WITH_AS(run_benchmark(failing, {16, 16, 1}, 20, 0),
                       doctest::Contains("pass 7"), std::runtime_error);
}

TEST_CASE("report serializes to json with the input spec") {
  const BenchReport r = run_benchmark([](const Frame&) {}, {832, 832, 3}, 3, 1);
  const std::string j = report_to_json(r);
  CHECK(j.find("\"n_passes\": 3") != std::string::npos);
  CHECK(j.find("\"width\": 832") != std::string::npos);
}
