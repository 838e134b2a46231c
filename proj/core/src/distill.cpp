#include "spacedet/distill.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>

#include "spacedet/error.hpp"
#include "spacedet/rng.hpp"

namespace spacedet {

namespace {

double catmull_rom(double t) {
  t = std::abs(t);
  if (t <= 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
  if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
  return 0.0;
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Align-corners source coordinate for output index j of m samples from n.
double align_corners_pos(int j, int m, int n) {
  if (m <= 1 || n <= 1) return 0.0;
  return static_cast<double>(j) * (n - 1) / static_cast<double>(m - 1);
}

void check_student(const ToyStudent& s) {
  if (s.kernel_size < 1 || s.kernel_size > ToyStudent::stride) {
    throw std::invalid_argument("student: kernel_size must be in [1, stride]");
  }
  if (s.in_channels != 3) {
    throw std::invalid_argument("student: expects 3 input channels");
  }
  if (s.out_channels < 1) {
    throw std::invalid_argument("student: out_channels must be positive");
  }
  const std::size_t k = static_cast<std::size_t>(s.kernel_size);
  if (s.kernel.size() != k * k * s.in_channels * s.out_channels ||
      s.bias.size() != static_cast<std::size_t>(s.out_channels)) {
    throw shape_error("student: parameter buffer sizes do not match geometry");
  }
}

}  // namespace

FeatureMap reshape_tokens(const std::vector<double>& tokens, int channels,
                          int image_h, int image_w) {
  if (channels < 1) throw std::invalid_argument("reshape_tokens: channels must be positive");
  const int gh = image_h / 16;
  const int gw = image_w / 16;
  if (gh < 1 || gw < 1) {
    throw std::invalid_argument("reshape_tokens: image smaller than one 16px patch");
  }
  const std::size_t expected_tokens = static_cast<std::size_t>(gh) * gw;
  if (tokens.size() != expected_tokens * channels) {
    throw shape_error("reshape_tokens: expected " +
                      std::to_string(expected_tokens) + " tokens x " +
                      std::to_string(channels) + " channels (" +
                      std::to_string(expected_tokens * channels) +
                      " values), got " + std::to_string(tokens.size()));
  }
  FeatureMap fm = FeatureMap::zeros(gh, gw, channels);
  for (int ch = 0; ch < channels; ++ch) {
    for (std::size_t t = 0; t < expected_tokens; ++t) {
      const int r = static_cast<int>(t) / gw;
      const int c = static_cast<int>(t) % gw;
      fm.at(r, c, ch) = tokens[static_cast<std::size_t>(ch) * expected_tokens + t];
    }
  }
  return fm;
}

FeatureMap upsample_features(const FeatureMap& fm, int target_h, int target_w,
                             Kernel kernel) {
  if (fm.h < 1 || fm.w < 1 || fm.c < 1) {
    throw std::invalid_argument("upsample_features: empty feature map");
  }
  if (target_h < fm.h || target_w < fm.w) {
    throw std::invalid_argument("upsample_features: target dims smaller than source");
  }
  if (target_h == fm.h && target_w == fm.w) return fm;

  FeatureMap out = FeatureMap::zeros(target_h, target_w, fm.c);
  for (int r = 0; r < target_h; ++r) {
    const double sy = align_corners_pos(r, target_h, fm.h);
    const int y0 = static_cast<int>(std::floor(sy));
    const double ty = sy - y0;
    for (int col = 0; col < target_w; ++col) {
      const double sx = align_corners_pos(col, target_w, fm.w);
      const int x0 = static_cast<int>(std::floor(sx));
      const double tx = sx - x0;
      for (int ch = 0; ch < fm.c; ++ch) {
        double v = 0.0;
        switch (kernel) {
          case Kernel::nearest: {
            v = fm.at(clamp_index(static_cast<int>(std::floor(sy + 0.5)), fm.h),
                      clamp_index(static_cast<int>(std::floor(sx + 0.5)), fm.w), ch);
            break;
          }
          case Kernel::bilinear: {
            const double v00 = fm.at(clamp_index(y0, fm.h), clamp_index(x0, fm.w), ch);
            const double v01 = fm.at(clamp_index(y0, fm.h), clamp_index(x0 + 1, fm.w), ch);
            const double v10 = fm.at(clamp_index(y0 + 1, fm.h), clamp_index(x0, fm.w), ch);
            const double v11 = fm.at(clamp_index(y0 + 1, fm.h), clamp_index(x0 + 1, fm.w), ch);
            const double top = v00 + tx * (v01 - v00);
            const double bot = v10 + tx * (v11 - v10);
            v = top + ty * (bot - top);
            break;
          }
          case Kernel::bicubic: {
            for (int ky = -1; ky <= 2; ++ky) {
              const double wy = catmull_rom(ty - ky);
              if (wy == 0.0) continue;
              double row = 0.0;
              for (int kx = -1; kx <= 2; ++kx) {
                row += catmull_rom(tx - kx) *
                       fm.at(clamp_index(y0 + ky, fm.h), clamp_index(x0 + kx, fm.w), ch);
              }
              v += wy * row;
            }
            break;
          }
        }
        out.at(r, col, ch) = v;
      }
    }
  }
  return out;
}

LossGrad distill_loss(const FeatureMap& z_cnn, const FeatureMap& z_teacher_up,
                      Reduction reduction) {
  if (z_cnn.h != z_teacher_up.h || z_cnn.w != z_teacher_up.w ||
      z_cnn.c != z_teacher_up.c) {
    throw shape_error("distill_loss: feature map dims differ (student " +
                      std::to_string(z_cnn.h) + "x" + std::to_string(z_cnn.w) +
                      "x" + std::to_string(z_cnn.c) + ", teacher " +
                      std::to_string(z_teacher_up.h) + "x" +
                      std::to_string(z_teacher_up.w) + "x" +
                      std::to_string(z_teacher_up.c) + ")");
  }
  LossGrad out;
  out.grad = FeatureMap::zeros(z_cnn.h, z_cnn.w, z_cnn.c);
  double sum = 0.0;
  for (std::size_t i = 0; i < z_cnn.data.size(); ++i) {
    const double d = z_cnn.data[i] - z_teacher_up.data[i];
    sum += d * d;
    out.grad.data[i] = 2.0 * d;
  }
  if (reduction == Reduction::mean_sq) {
    const double n = static_cast<double>(z_cnn.data.size());
    sum /= n;
    for (double& g : out.grad.data) g /= n;
  }
  out.loss = sum;
  return out;
}

ToyStudent ToyStudent::zeros(int kernel_size, int out_channels) {
  ToyStudent s;
  s.kernel_size = kernel_size;
  s.out_channels = out_channels;
  s.kernel.assign(static_cast<std::size_t>(kernel_size) * kernel_size *
                      s.in_channels * out_channels,
                  0.0);
  s.bias.assign(out_channels, 0.0);
  check_student(s);
  return s;
}

ToyStudent ToyStudent::seeded(int kernel_size, int out_channels,
                              std::uint64_t seed, double scale) {
  ToyStudent s = zeros(kernel_size, out_channels);
  SplitMix64 rng(SplitMix64::hash(seed, 0xdf11ULL));
  for (double& w : s.kernel) w = scale * rng.normal();
  for (double& b : s.bias) b = scale * rng.normal();
  return s;
}

FeatureMap student_forward(const ToyStudent& student, const Frame& image) {
  check_student(student);
  validate(image);
  if (image.channels != student.in_channels) {
    throw std::invalid_argument("student_forward: image channel mismatch");
  }
  if (image.height < ToyStudent::stride || image.width < ToyStudent::stride) {
    throw std::invalid_argument("student_forward: image smaller than stride");
  }
  const int oh = image.height / ToyStudent::stride;
  const int ow = image.width / ToyStudent::stride;
  const int k = student.kernel_size;
  const int ci = student.in_channels;
  const int co = student.out_channels;

  FeatureMap out = FeatureMap::zeros(oh, ow, co);
  for (int i = 0; i < oh; ++i) {
    for (int j = 0; j < ow; ++j) {
      for (int ch = 0; ch < co; ++ch) out.at(i, j, ch) = student.bias[ch];
      for (int u = 0; u < k; ++u) {
        for (int v = 0; v < k; ++v) {
          for (int c = 0; c < ci; ++c) {
            const double x =
                image.at(i * ToyStudent::stride + u, j * ToyStudent::stride + v, c);
            const std::size_t base =
                ((static_cast<std::size_t>(u) * k + v) * ci + c) * co;
            for (int ch = 0; ch < co; ++ch) {
              out.at(i, j, ch) += student.kernel[base + ch] * x;
            }
          }
        }
      }
    }
  }
  return out;
}

StudentGrads student_backward(const ToyStudent& student, const Frame& image,
                              const FeatureMap& upstream) {
  check_student(student);
  validate(image);
  const int oh = image.height / ToyStudent::stride;
  const int ow = image.width / ToyStudent::stride;
  if (upstream.h != oh || upstream.w != ow || upstream.c != student.out_channels) {
    throw shape_error("student_backward: upstream gradient dims mismatch");
  }
  const int k = student.kernel_size;
  const int ci = student.in_channels;
  const int co = student.out_channels;

  StudentGrads grads;
  grads.kernel.assign(student.kernel.size(), 0.0);
  grads.bias.assign(student.bias.size(), 0.0);
  for (int i = 0; i < oh; ++i) {
    for (int j = 0; j < ow; ++j) {
      for (int ch = 0; ch < co; ++ch) {
        grads.bias[ch] += upstream.at(i, j, ch);
      }
      for (int u = 0; u < k; ++u) {
        for (int v = 0; v < k; ++v) {
          for (int c = 0; c < ci; ++c) {
            const double x =
                image.at(i * ToyStudent::stride + u, j * ToyStudent::stride + v, c);
            const std::size_t base =
                ((static_cast<std::size_t>(u) * k + v) * ci + c) * co;
            for (int ch = 0; ch < co; ++ch) {
              grads.kernel[base + ch] += upstream.at(i, j, ch) * x;
            }
          }
        }
      }
    }
  }
  return grads;
}

void sgd_step(std::span<double> params, std::span<const double> grads, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("sgd_step: eta must be positive");
  if (params.size() != grads.size()) {
    throw shape_error("sgd_step: parameter/gradient size mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= eta * grads[i];
}

TeacherFn make_mock_teacher(int channels, std::uint64_t seed) {
  if (channels < 1) {
    throw std::invalid_argument("make_mock_teacher: channels must be positive");
  }
  constexpr int patch = 16;
  const std::size_t in_dim = static_cast<std::size_t>(patch) * patch * 3;
  auto projection = std::make_shared<std::vector<double>>(in_dim * channels);
  SplitMix64 rng(SplitMix64::hash(seed, 0x7eacULL));
  const double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
  for (double& w : *projection) w = scale * rng.normal();

  return [channels, projection](const Frame& image) -> FeatureMap {
    validate(image);
    const int gh = image.height / patch;
    const int gw = image.width / patch;
    if (gh < 1 || gw < 1) {
      throw std::invalid_argument("mock teacher: image smaller than one 16px patch");
    }
    FeatureMap fm = FeatureMap::zeros(gh, gw, channels);
    std::vector<double> patch_vec(static_cast<std::size_t>(patch) * patch * 3);
    for (int i = 0; i < gh; ++i) {
      for (int j = 0; j < gw; ++j) {
        std::size_t p = 0;
        for (int u = 0; u < patch; ++u) {
          for (int v = 0; v < patch; ++v) {
            for (int c = 0; c < 3; ++c) {
              patch_vec[p++] = image.channels == 3
                                   ? image.at(i * patch + u, j * patch + v, c)
                                   : image.at(i * patch + u, j * patch + v, 0);
            }
          }
        }
        for (int ch = 0; ch < channels; ++ch) {
          double acc = 0.0;
          const std::size_t base = static_cast<std::size_t>(ch) * patch_vec.size();
          for (std::size_t q = 0; q < patch_vec.size(); ++q) {
            acc += (*projection)[base + q] * patch_vec[q];
          }
          fm.at(i, j, ch) = acc;
        }
      }
    }
    return fm;
  };
}

DistillResult distill(const TeacherFn& teacher, ToyStudent student,
                      const std::vector<Frame>& dataset,
                      const DistillOptions& options) {
  check_student(student);
  if (dataset.empty()) throw std::invalid_argument("distill: empty dataset");
  if (options.epochs < 1) throw std::invalid_argument("distill: epochs must be >= 1");
  if (!(options.eta > 0.0)) throw std::invalid_argument("distill: eta must be positive");
  const std::size_t batch =
      options.batch <= 0
          ? dataset.size()
          : std::min<std::size_t>(options.batch, dataset.size());

  DistillResult result;
  result.loss_trace.reserve(options.epochs);

  // Teacher features do not depend on the student parameters; compute once.
  std::vector<FeatureMap> targets;
  targets.reserve(dataset.size());
  for (const Frame& image : dataset) {
    const FeatureMap z_t = teacher(image);
    const int oh = image.height / ToyStudent::stride;
    const int ow = image.width / ToyStudent::stride;
    targets.push_back(z_t.h == oh && z_t.w == ow
                          ? z_t
                          : upsample_features(z_t, oh, ow, options.upsample_kernel));
  }

  SplitMix64 batch_rng(SplitMix64::hash(options.batch_seed, 0xba7cULL));
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    // Seeded shuffle, then the first `batch` indices form this epoch's batch.
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[batch_rng.below(i)]);
    }
    // Accumulate in index order so the gradient sum is independent of the
    // shuffle (and of any future fan-out across workers).
    std::vector<std::size_t> batch_idx(order.begin(), order.begin() + batch);
    std::sort(batch_idx.begin(), batch_idx.end());

    StudentGrads acc;
    acc.kernel.assign(student.kernel.size(), 0.0);
    acc.bias.assign(student.bias.size(), 0.0);
    double mean_loss = 0.0;

    for (const std::size_t idx : batch_idx) {
      const FeatureMap z_cnn = student_forward(student, dataset[idx]);
      const LossGrad lg = distill_loss(z_cnn, targets[idx], options.reduction);
      mean_loss += lg.loss;
      const StudentGrads g = student_backward(student, dataset[idx], lg.grad);
      for (std::size_t i = 0; i < acc.kernel.size(); ++i) acc.kernel[i] += g.kernel[i];
      for (std::size_t i = 0; i < acc.bias.size(); ++i) acc.bias[i] += g.bias[i];
    }
    mean_loss /= static_cast<double>(batch);
    if (!std::isfinite(mean_loss)) {
      throw divergence_error("distill: non-finite loss at epoch " +
                             std::to_string(epoch) + " (eta=" +
                             std::to_string(options.eta) + ")");
    }
    result.loss_trace.push_back(mean_loss);

    const double inv_batch = 1.0 / static_cast<double>(batch);
    for (double& g : acc.kernel) g *= inv_batch;
    for (double& g : acc.bias) g *= inv_batch;
    sgd_step(student.kernel, acc.kernel, options.eta);
    sgd_step(student.bias, acc.bias, options.eta);
  }

  result.student = std::move(student);
  return result;
}

}  // namespace spacedet
