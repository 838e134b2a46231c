#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "spacedet/frame.hpp"
#include "spacedet/raster.hpp"

namespace spacedet {

/// H x W x C grid of reals, row-major, channel-last.
struct FeatureMap {
  int h = 0;
  int w = 0;
  int c = 0;
  std::vector<double> data;

  double& at(int row, int col, int ch) {
    return data[(static_cast<std::size_t>(row) * w + col) * c + ch];
  }
  double at(int row, int col, int ch) const {
    return data[(static_cast<std::size_t>(row) * w + col) * c + ch];
  }

  static FeatureMap zeros(int h, int w, int c) {
    FeatureMap fm;
    fm.h = h;
    fm.w = w;
    fm.c = c;
    fm.data.assign(static_cast<std::size_t>(h) * w * c, 0.0);
    return fm;
  }
};

/// Reshape a c x T token matrix (row-major: channel rows, token columns,
/// tokens in row-major grid order) into a (floor(H/16), floor(W/16), c) map.
/// Throws shape_error reporting expected vs actual when T does not match.
FeatureMap reshape_tokens(const std::vector<double>& tokens, int channels,
                          int image_h, int image_w);

/// Per-channel interpolation to larger dims under align-corners sampling;
/// constant channels stay constant. Downscaling is rejected.
FeatureMap upsample_features(const FeatureMap& fm, int target_h, int target_w,
                             Kernel kernel = Kernel::bicubic);

enum class Reduction { sum_sq, mean_sq };

struct LossGrad {
  double loss = 0.0;
  FeatureMap grad;  // d loss / d z_cnn
};

/// Squared-error feature regression: sum_sq = sum d^2, mean_sq divides by
/// h*w*c; the gradient w.r.t. the student map is 2d (scaled accordingly).
LossGrad distill_loss(const FeatureMap& z_cnn, const FeatureMap& z_teacher_up,
                      Reduction reduction = Reduction::mean_sq);

/// Single strided cross-correlation layer with bias: linear in its
/// parameters, which keeps the distillation objective convex while still
/// exercising the full teacher-student training loop. Produces a
/// (floor(H/8), floor(W/8), c) map.
struct ToyStudent {
  static constexpr int stride = 8;
  int kernel_size = 8;
  int in_channels = 3;
  int out_channels = 384;
  std::vector<double> kernel;  // k*k*in*out, index ((u*k + v)*in + ci)*out + co
  std::vector<double> bias;    // out

  std::size_t param_count() const { return kernel.size() + bias.size(); }

  static ToyStudent zeros(int kernel_size, int out_channels);
  static ToyStudent seeded(int kernel_size, int out_channels, std::uint64_t seed,
                           double scale = 0.01);
};

FeatureMap student_forward(const ToyStudent& student, const Frame& image);

/// Parameter gradients from backpropagating an upstream feature-map gradient
/// through the strided correlation.
struct StudentGrads {
  std::vector<double> kernel;
  std::vector<double> bias;
};
StudentGrads student_backward(const ToyStudent& student, const Frame& image,
                              const FeatureMap& upstream);

/// theta := theta - eta * grad, element-wise.
void sgd_step(std::span<double> params, std::span<const double> grads, double eta);

/// Deterministic map from image to teacher features. Same image, same output.
using TeacherFn = std::function<FeatureMap(const Frame&)>;

/// Built-in mock teacher: a fixed seeded linear projection of non-overlapping
/// 16x16 patches to `channels` outputs.
TeacherFn make_mock_teacher(int channels, std::uint64_t seed);

struct DistillOptions {
  int epochs = 200;
  double eta = 1e-3;
  int batch = 0;  // 0 means full dataset
  Reduction reduction = Reduction::mean_sq;
  Kernel upsample_kernel = Kernel::bicubic;
  std::uint64_t batch_seed = 0;
};

struct DistillResult {
  ToyStudent student;
  std::vector<double> loss_trace;  // mean batch loss per epoch
};

/// One SGD step per epoch on a seeded sampled batch: teacher features,
/// student features, teacher upsampled to student dims, squared-error loss,
/// parameter update. Aborts with divergence_error (naming eta) if the loss
/// stops being finite.
DistillResult distill(const TeacherFn& teacher, ToyStudent student,
                      const std::vector<Frame>& dataset,
                      const DistillOptions& options);

}  // namespace spacedet
