#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"
#include "spacedet/error.hpp"

namespace {

// Exit codes: 0 ok, 2 usage/config/schema, 3 I/O, 4 numeric divergence.
int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const spacedet::io_error*>(&e)) return 3;
  if (dynamic_cast<const spacedet::divergence_error*>(&e)) return 4;
  if (dynamic_cast<const spacedet::parse_error*>(&e)) return 2;
  if (dynamic_cast<const spacedet::placement_error*>(&e)) return 2;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 2;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace spacedet::cli;

  CLI::App app{"spacedet: synthetic spacecraft dataset synthesis, evaluation, "
               "track filtering, distillation and benchmarking"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Render a synthetic labeled dataset from a config");
  synth_cmd->add_option("-c,--config", synth.config_path, "Config JSON")->required();
  synth_cmd->add_option("-n,--n", synth.n_scenes, "Number of scenes")->required();
  auto* synth_seed = synth_cmd->add_option("--seed", synth.seed, "Master seed");
  synth_cmd->add_option("-o,--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("-j,--jobs", synth.jobs, "Worker count");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score detections or segmentations");
  eval_cmd->add_option("--task", eval.task, "det or seg")->required();
  eval_cmd->add_option("--dets", eval.dets_path, "Detections JSONL (det)");
  eval_cmd->add_option("--preds", eval.preds_dir, "Prediction mask dir (seg)");
  eval_cmd->add_option("--gt", eval.gt_path, "COCO JSON (det) or mask dir (seg)")
      ->required();
  eval_cmd->add_option("--iou", eval.iou_thresholds, "IoU thresholds (det)");
  eval_cmd->add_option("--interp", eval.interp, "points_101 or all_points");
  eval_cmd->add_option("--classes", eval.class_names, "Class names (seg)");
  eval_cmd->add_option("-j,--jobs", eval.jobs, "Worker count (seg)");
  eval_cmd->add_option("-o,--out", eval.out_dir, "Output directory")->required();

  FilterArgs filter;
  auto* filter_cmd = app.add_subcommand(
      "filter", "Label tracks as target/background by velocity residual");
  filter_cmd->add_option("--dets", filter.dets_path, "Detections JSONL with frame_index")
      ->required();
  auto* flow_opt =
      filter_cmd->add_option("--flow", filter.flow, "Expected background flow vx vy")
          ->expected(2);
  filter_cmd->add_option("--flow-mode", filter.flow_mode, "config or median");
  filter_cmd->add_option("--gate", filter.gate_px, "Association gate (px)");
  filter_cmd->add_option("--thresh", filter.residual_thresh_px,
                         "Velocity residual threshold (px/frame)");
  filter_cmd->add_option("-o,--out", filter.out_dir, "Output directory")->required();

  SplitArgs split;
  auto* split_cmd =
      app.add_subcommand("split", "Deterministic train/val/test split");
  split_cmd->add_option("--coco", split.coco_path, "COCO JSON")->required();
  split_cmd->add_option("--ratios", split.ratios, "train val test ratios")->expected(3);
  split_cmd->add_option("--seed", split.seed, "Shuffle seed");
  split_cmd->add_option("-o,--out", split.out_dir, "Output directory")->required();

  SubsampleArgs subsample;
  auto* subsample_cmd = app.add_subcommand(
      "subsample", "Nested subsampling of the training split");
  subsample_cmd->add_option("--split", subsample.split_path, "splits.json")->required();
  subsample_cmd->add_option("--fraction", subsample.fraction, "Fraction of train to keep")
      ->required();
  subsample_cmd->add_option("--seed", subsample.seed, "Subsample seed");
  subsample_cmd->add_option("-o,--out", subsample.out_dir, "Output directory")
      ->required();

  ConvertArgs convert;
  auto* convert_cmd = app.add_subcommand("convert", "Convert annotation formats");
  convert_cmd->add_option("--coco", convert.coco_path, "COCO JSON input")->required();
  convert_cmd->add_option("--to", convert.to, "yolo or coco");
  convert_cmd->add_option("-o,--out", convert.out_dir, "Output directory")->required();

  DistillDemoArgs distill;
  auto* distill_cmd = app.add_subcommand(
      "distill-demo", "Teacher-student feature regression on a toy dataset");
  distill_cmd->add_option("--epochs", distill.epochs, "Epochs");
  distill_cmd->add_option("--eta", distill.eta, "Learning rate");
  distill_cmd->add_option("--batch", distill.batch, "Batch size (0 = full)");
  distill_cmd->add_option("--channels", distill.channels, "Feature channels");
  distill_cmd->add_option("--kernel-size", distill.kernel_size, "Student kernel size");
  distill_cmd->add_option("--images", distill.n_images, "Synthetic image count");
  distill_cmd->add_option("--size", distill.image_size, "Synthetic image side (px)");
  distill_cmd->add_option("--seed", distill.seed, "Seed");
  distill_cmd->add_option("--reduction", distill.reduction, "mean_sq or sum_sq");
  distill_cmd->add_option("--upsample", distill.upsample, "bicubic or bilinear");
  distill_cmd->add_option("-o,--out", distill.out_dir, "Output directory")->required();

  BenchArgs bench;
  auto* bench_cmd =
      app.add_subcommand("bench", "Latency benchmark of a pipeline stage");
  bench_cmd->add_option("--target", bench.target, "noop, render, miou, distill-step");
  bench_cmd->add_option("--passes", bench.passes, "Timed passes");
  bench_cmd->add_option("--warmup", bench.warmup, "Warmup passes (excluded)");
  bench_cmd->add_option("--width", bench.width, "Input width");
  bench_cmd->add_option("--height", bench.height, "Input height");
  bench_cmd->add_option("--channels", bench.channels, "Input channels");
  bench_cmd->add_option("-o,--out", bench.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*synth_cmd) {
      synth.seed_given = synth_seed->count() > 0;
      return cmd_synth(synth);
    }
    if (*eval_cmd) return cmd_eval(eval);
    if (*filter_cmd) {
      if (flow_opt->count() > 0 && filter.flow_mode == "median") {
        throw std::invalid_argument("filter: --flow and --flow-mode median are exclusive");
      }
      if (filter.flow_mode != "median" && filter.flow_mode != "config") {
        throw std::invalid_argument("filter: --flow-mode must be config or median");
      }
      return cmd_filter(filter);
    }
    if (*split_cmd) return cmd_split(split);
    if (*subsample_cmd) return cmd_subsample(subsample);
    if (*convert_cmd) return cmd_convert(convert);
    if (*distill_cmd) return cmd_distill_demo(distill);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  }
  return 0;
}
