#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spacedet::cli {

struct SynthArgs {
  std::string config_path;
  int n_scenes = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
  int jobs = 1;
};
int cmd_synth(const SynthArgs& args);

struct EvalArgs {
  std::string task;  // "det" or "seg"
  std::string dets_path;
  std::string preds_dir;
  std::string gt_path;
  std::vector<double> iou_thresholds{0.5, 0.75};
  std::string interp = "points_101";
  std::string match_rule = "closest_center";
  std::vector<std::string> class_names;
  std::string out_dir;
  int jobs = 1;
};
int cmd_eval(const EvalArgs& args);

struct FilterArgs {
  std::string dets_path;
  std::vector<double> flow;  // empty unless --flow vx vy given
  std::string flow_mode = "config";
  double gate_px = 10.0;
  double residual_thresh_px = 1.0;
  std::string out_dir;
};
int cmd_filter(const FilterArgs& args);

struct SplitArgs {
  std::string coco_path;
  std::vector<double> ratios{0.75, 0.20, 0.05};
  std::uint64_t seed = 0;
  std::string out_dir;
};
int cmd_split(const SplitArgs& args);

struct SubsampleArgs {
  std::string split_path;
  double fraction = 1.0;
  std::uint64_t seed = 0;
  std::string out_dir;
};
int cmd_subsample(const SubsampleArgs& args);

struct ConvertArgs {
  std::string coco_path;
  std::string to = "yolo";
  std::string out_dir;
};
int cmd_convert(const ConvertArgs& args);

struct DistillDemoArgs {
  int epochs = 200;
  double eta = 1e-3;
  int batch = 0;
  int channels = 8;
  int kernel_size = 8;
  int n_images = 16;
  int image_size = 32;
  std::uint64_t seed = 1;
  std::string reduction = "mean_sq";
  std::string upsample = "bicubic";
  std::string out_dir;
};
int cmd_distill_demo(const DistillDemoArgs& args);

struct BenchArgs {
  std::string target = "noop";
  int passes = 500;
  int warmup = 10;
  int width = 832;
  int height = 832;
  int channels = 3;
  std::string out_dir;
};
int cmd_bench(const BenchArgs& args);

}  // namespace spacedet::cli
