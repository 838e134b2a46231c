#include <benchmark/benchmark.h>

#include "spacedet/distill.hpp"
#include "spacedet/rng.hpp"

namespace {

using namespace spacedet;

Frame random_rgb(int n, std::uint64_t seed) {
  Frame f = Frame::constant(n, n, 3, 0.0, Band::RGB);
  SplitMix64 rng(seed);
  for (double& v : f.data) v = rng.uniform();
  return f;
}

void BM_student_forward_224(benchmark::State& state) {
  const ToyStudent student = ToyStudent::seeded(8, 8, 1);
  const Frame image = random_rgb(224, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(student_forward(student, image));
  }
}
BENCHMARK(BM_student_forward_224);

void BM_teacher_forward_224(benchmark::State& state) {
  const TeacherFn teacher = make_mock_teacher(8, 3);
  const Frame image = random_rgb(224, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(teacher(image));
  }
}
BENCHMARK(BM_teacher_forward_224);

void BM_distill_step_224(benchmark::State& state) {
  const ToyStudent student = ToyStudent::seeded(8, 8, 5);
  const TeacherFn teacher = make_mock_teacher(8, 6);
  const Frame image = random_rgb(224, 7);
  const FeatureMap target = teacher(image);
  for (auto _ : state) {
    const FeatureMap z = student_forward(student, image);
    const FeatureMap up = upsample_features(target, z.h, z.w);
    const LossGrad lg = distill_loss(z, up);
    benchmark::DoNotOptimize(student_backward(student, image, lg.grad));
  }
}
BENCHMARK(BM_distill_step_224);

}  // namespace
