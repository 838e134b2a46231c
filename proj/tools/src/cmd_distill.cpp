#include <cstdio>
#include <filesystem>
#include <fstream>

#include "commands.hpp"
#include "common.hpp"
#include "spacedet/distill.hpp"
#include "spacedet/rng.hpp"

namespace spacedet::cli {

namespace {

using nlohmann::json;

// Flat-field frames at evenly spaced gray levels. The mock teacher is linear,
// so these targets are exactly representable by the strided-conv student and
// the regression optimum is (numerically) zero; textured random images would
// leave an irreducible residual because the teacher's 16px patches see pixels
// outside the student's 8px windows.
std::vector<Frame> flat_field_dataset(int n_images, int size) {
  std::vector<Frame> images;
  images.reserve(n_images);
  for (int i = 0; i < n_images; ++i) {
    const double g =
        n_images > 1 ? 0.05 + 0.9 * static_cast<double>(i) / (n_images - 1)
                     : 0.5;
    images.push_back(Frame::constant(size, size, 3, g, Band::RGB));
  }
  return images;
}

}  // namespace

int cmd_distill_demo(const DistillDemoArgs& args) {
  if (args.image_size < 16 || args.image_size % 16 != 0) {
    throw std::invalid_argument("distill-demo: --size must be a positive multiple of 16");
  }
  if (args.n_images < 1) {
    throw std::invalid_argument("distill-demo: --images must be >= 1");
  }

  const std::vector<Frame> dataset =
      flat_field_dataset(args.n_images, args.image_size);
  const TeacherFn teacher =
      make_mock_teacher(args.channels, SplitMix64::hash(args.seed, 1));
  ToyStudent student = ToyStudent::seeded(args.kernel_size, args.channels,
                                          SplitMix64::hash(args.seed, 2));

  DistillOptions options;
  options.epochs = args.epochs;
  options.eta = args.eta;
  options.batch = args.batch;
  options.reduction =
      args.reduction == "sum_sq" ? Reduction::sum_sq : Reduction::mean_sq;
  options.upsample_kernel = kernel_from_name(args.upsample);
  options.batch_seed = SplitMix64::hash(args.seed, 3);

  const DistillResult result =
      distill(teacher, std::move(student), dataset, options);

  const std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);
  {
    std::ofstream csv(out / "loss_trace.csv", std::ios::binary);
    if (!csv) throw io_error("cannot write: " + (out / "loss_trace.csv").string());
    csv << "epoch,mean_loss\n";
    for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
      char row[64];
      std::snprintf(row, sizeof(row), "%zu,%.17g\n", e, result.loss_trace[e]);
      csv << row;
    }
  }

  const double initial = result.loss_trace.front();
  const double final_loss = result.loss_trace.back();
  json summary{{"initial_loss", initial},
               {"final_loss", final_loss},
               {"final_over_initial", final_loss / initial},
               {"epochs", args.epochs}};
  {
    std::ofstream f(out / "summary.json", std::ios::binary);
    f << summary.dump(2) << "\n";
  }
  write_resolved_config(out, json{{"command", "distill-demo"},
                                  {"epochs", args.epochs},
                                  {"eta", args.eta},
                                  {"batch", args.batch},
                                  {"channels", args.channels},
                                  {"kernel_size", args.kernel_size},
                                  {"images", args.n_images},
                                  {"size", args.image_size},
                                  {"seed", args.seed},
                                  {"reduction", args.reduction},
                                  {"upsample", args.upsample}});

  std::printf("distill-demo: loss %.6g -> %.6g (%.3f%% of initial) over %d epochs\n",
              initial, final_loss, 100.0 * final_loss / initial, args.epochs);
  return 0;
}

}  // namespace spacedet::cli
