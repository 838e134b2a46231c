#include <cstdio>
#include <filesystem>

#include "commands.hpp"
#include "common.hpp"
#include "spacedet/datasetio.hpp"

namespace spacedet::cli {

using nlohmann::json;

int cmd_split(const SplitArgs& args) {
  if (args.ratios.size() != 3) {
    throw std::invalid_argument("split: --ratios takes exactly 3 values");
  }
  const DatasetManifest manifest = read_coco(args.coco_path);
  const SplitAssignment split = split_dataset(
      manifest, {args.ratios[0], args.ratios[1], args.ratios[2]}, args.seed);

  const std::filesystem::path out(args.out_dir);
  write_split(split, out / "splits.json");
  write_resolved_config(out, json{{"command", "split"},
                                  {"coco", args.coco_path},
                                  {"ratios", args.ratios},
                                  {"seed", args.seed}});
  std::printf("split: %zu train / %zu val / %zu test\n", split.train.size(),
              split.val.size(), split.test.size());
  return 0;
}

int cmd_subsample(const SubsampleArgs& args) {
  const SplitAssignment split = read_split(args.split_path);
  const SplitAssignment sub = subsample_train(split, args.fraction, args.seed);

  const std::filesystem::path out(args.out_dir);
  write_split(sub, out / "splits.json");
  write_resolved_config(out, json{{"command", "subsample"},
                                  {"split", args.split_path},
                                  {"fraction", args.fraction},
                                  {"seed", args.seed}});
  std::printf("subsample: kept %zu of %zu train ids (fraction %.4g)\n",
              sub.train.size(), split.train.size(), args.fraction);
  return 0;
}

int cmd_convert(const ConvertArgs& args) {
  const DatasetManifest manifest = read_coco(args.coco_path);
  const std::filesystem::path out(args.out_dir);

  if (args.to == "yolo") {
    write_yolo(manifest, out);
    std::printf("convert: wrote %zu yolo label files to %s\n",
                manifest.entries.size(), (out / "labels").string().c_str());
  } else if (args.to == "coco") {
    write_coco(manifest, out / "coco.json");
    std::printf("convert: rewrote %zu images to %s\n", manifest.entries.size(),
                (out / "coco.json").string().c_str());
  } else {
    throw std::invalid_argument("convert: --to must be yolo or coco");
  }
  write_resolved_config(out, json{{"command", "convert"},
                                  {"coco", args.coco_path},
                                  {"to", args.to}});
  return 0;
}

}  // namespace spacedet::cli
