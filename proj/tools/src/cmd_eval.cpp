#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "commands.hpp"
#include "common.hpp"
#include "spacedet/datasetio.hpp"
#include "spacedet/metrics.hpp"
#include "spacedet/raster_io.hpp"

namespace spacedet::cli {

namespace {

using nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write: " + path.string());
  out << text;
}

int eval_det(const EvalArgs& args) {
  const DatasetManifest gt_manifest = read_coco(args.gt_path);
  std::vector<GroundTruthBox> gts;
  for (const auto& entry : gt_manifest.entries) {
    for (const auto& ann : entry.annotations) {
      gts.push_back({entry.image_id, ann.class_id, ann.bbox});
    }
  }
  const std::vector<Detection> dets = read_detections_jsonl(args.dets_path);
  const ApInterp interp = args.interp == "all_points" ? ApInterp::all_points
                                                      : ApInterp::points_101;

  json results = json::array();
  std::string csv = "iou_thresh,ap\n";
  for (const double thresh : args.iou_thresholds) {
    const PRCurve curve = pr_curve(dets, gts, thresh);
    const double ap = average_precision(curve, interp);
    results.push_back({{"iou_thresh", thresh}, {"ap", ap}});
    char row[64];
    std::snprintf(row, sizeof(row), "%.2f,%.6f\n", thresh, ap);
    csv += row;
    std::printf("AP@%.2f = %.4f\n", thresh, ap);
  }

  const std::filesystem::path out(args.out_dir);
  json report{{"task", "det"},
              {"interpolation", args.interp},
              {"n_detections", dets.size()},
              {"n_ground_truths", gts.size()},
              {"results", results}};
  write_text(out / "metrics.json", report.dump(2) + "\n");
  write_text(out / "metrics.csv", csv);
  write_resolved_config(out, json{{"command", "eval"},
                                  {"task", "det"},
                                  {"dets", args.dets_path},
                                  {"gt", args.gt_path},
                                  {"iou", args.iou_thresholds},
                                  {"interpolation", args.interp}});
  return 0;
}

std::vector<int> class_map_from_png(const std::filesystem::path& path, int& w,
                                    int& h) {
  const LoadedRaster loaded = read_raster(path);
  if (loaded.frame.channels != 1 || loaded.bit_depth != 8) {
    throw parse_error("segmentation maps must be 8-bit grayscale PNGs: " +
                      path.string());
  }
  w = loaded.frame.width;
  h = loaded.frame.height;
  std::vector<int> ids(loaded.frame.data.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ids[i] = static_cast<int>(std::lround(loaded.frame.data[i] * 255.0));
  }
  return ids;
}

int eval_seg(const EvalArgs& args) {
  const std::filesystem::path gt_dir(args.gt_path);
  const std::filesystem::path pred_dir(args.preds_dir);
  if (!std::filesystem::is_directory(gt_dir)) {
    throw io_error("gt directory not found: " + gt_dir.string());
  }
  std::vector<std::filesystem::path> gt_files;
  for (const auto& e : std::filesystem::directory_iterator(gt_dir)) {
    if (e.path().extension() == ".png") gt_files.push_back(e.path());
  }
  std::sort(gt_files.begin(), gt_files.end());
  if (gt_files.empty()) throw io_error("no .png masks in " + gt_dir.string());

  // First pass loads everything; class count is the max id + 1 across maps.
  std::vector<SegSample> samples;
  int num_classes = static_cast<int>(args.class_names.size());
  for (const auto& gt_file : gt_files) {
    const auto pred_file = pred_dir / gt_file.filename();
    if (!std::filesystem::exists(pred_file)) {
      throw io_error("missing prediction for " + gt_file.filename().string());
    }
    SegSample s;
    int pw = 0, ph = 0;
    s.gt = class_map_from_png(gt_file, s.width, s.height);
    s.pred = class_map_from_png(pred_file, pw, ph);
    if (pw != s.width || ph != s.height) {
      throw parse_error("dimension mismatch between " + gt_file.string() +
                        " and " + pred_file.string());
    }
    for (const int v : s.gt) num_classes = std::max(num_classes, v + 1);
    for (const int v : s.pred) num_classes = std::max(num_classes, v + 1);
    samples.push_back(std::move(s));
  }

  // Chunked accumulation merged in index order; result is jobs-independent.
  const int jobs = std::clamp(args.jobs, 1, 64);
  std::vector<SegAccumulator> partial(jobs, SegAccumulator(num_classes));
  if (jobs == 1) {
    for (const auto& s : samples) partial[0].add(s);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (samples.size() + jobs - 1) / jobs;
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&, t]() {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(samples.size(), lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) partial[t].add(samples[i]);
      });
    }
    for (auto& th : pool) th.join();
  }
  SegAccumulator acc = partial[0];
  for (int t = 1; t < jobs; ++t) acc.merge(partial[t]);
  const IouReport report = acc.report(true);

  auto class_name = [&](int id) {
    return id < static_cast<int>(args.class_names.size())
               ? args.class_names[id]
               : "class_" + std::to_string(id);
  };

  json per_class = json::object();
  std::string csv = "class,iou\n";
  for (const auto& [id, iou] : report.per_class) {
    per_class[class_name(id)] = iou;
    char row[96];
    std::snprintf(row, sizeof(row), "%s,%.6f\n", class_name(id).c_str(), iou);
    csv += row;
    std::printf("IoU %-16s %.4f\n", class_name(id).c_str(), iou);
  }
  char mean_row[64];
  std::snprintf(mean_row, sizeof(mean_row), "mean,%.6f\n", report.mean);
  csv += mean_row;
  std::printf("mIoU = %.4f\n", report.mean);

  const std::filesystem::path out(args.out_dir);
  write_text(out / "metrics.json",
             json{{"task", "seg"},
                  {"n_images", samples.size()},
                  {"per_class", per_class},
                  {"mean_iou", report.mean}}
                     .dump(2) +
                 "\n");
  write_text(out / "metrics.csv", csv);
  write_resolved_config(out, json{{"command", "eval"},
                                  {"task", "seg"},
                                  {"preds", args.preds_dir},
                                  {"gt", args.gt_path},
                                  {"jobs", jobs}});
  return 0;
}

}  // namespace

int cmd_eval(const EvalArgs& args) {
  if (args.task == "det") return eval_det(args);
  if (args.task == "seg") return eval_seg(args);
  throw std::invalid_argument("eval: task must be det or seg");
}

}  // namespace spacedet::cli
