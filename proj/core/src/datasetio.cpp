#include "spacedet/datasetio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "spacedet/rng.hpp"

namespace spacedet {

using nlohmann::json;

namespace {

json scene_to_json(const SceneSpec& spec) {
  return json{{"seed", spec.seed},
              {"scene_index", spec.scene_index},
              {"background_id", spec.background_id},
              {"sprite_id", spec.sprite_id},
              {"crop_origin_m", spec.crop_origin_m},
              {"distance_m", spec.distance_m},
              {"orientation_rad", spec.orientation_rad},
              {"position_px", spec.position_px},
              {"blend", blend_mode_name(spec.blend)},
              {"contrast_jitter", spec.contrast_jitter}};
}

SceneSpec scene_from_json(const json& j) {
  SceneSpec spec;
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.scene_index = j.at("scene_index").get<std::uint64_t>();
  spec.background_id = j.at("background_id").get<std::string>();
  spec.sprite_id = j.at("sprite_id").get<std::string>();
  spec.crop_origin_m = j.at("crop_origin_m").get<std::array<double, 2>>();
  spec.distance_m = j.at("distance_m").get<double>();
  spec.orientation_rad = j.at("orientation_rad").get<double>();
  spec.position_px = j.at("position_px").get<std::array<int, 2>>();
  spec.blend = blend_mode_from_name(j.at("blend").get<std::string>());
  spec.contrast_jitter = j.at("contrast_jitter").get<double>();
  return spec;
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw parse_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (!path.parent_path().empty()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write: " + path.string());
  out << text;
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace

const char* blend_mode_name(BlendMode mode) {
  return mode == BlendMode::multiply ? "multiply" : "replace";
}

BlendMode blend_mode_from_name(const std::string& name) {
  if (name == "multiply") return BlendMode::multiply;
  if (name == "replace") return BlendMode::replace;
  throw parse_error("unknown blend mode: " + name);
}

const char* kernel_name(Kernel kernel) {
  switch (kernel) {
    case Kernel::nearest: return "nearest";
    case Kernel::bilinear: return "bilinear";
    case Kernel::bicubic: return "bicubic";
  }
  return "bilinear";
}

Kernel kernel_from_name(const std::string& name) {
  if (name == "nearest") return Kernel::nearest;
  if (name == "bilinear") return Kernel::bilinear;
  if (name == "bicubic") return Kernel::bicubic;
  throw parse_error("unknown resampling kernel: " + name);
}

void validate(const DatasetManifest& manifest) {
  std::set<std::string> seen;
  for (const auto& entry : manifest.entries) {
    if (!seen.insert(entry.image_id).second) {
      throw std::invalid_argument("manifest: duplicate image_id " + entry.image_id);
    }
    for (const auto& ann : entry.annotations) {
      if (ann.class_id < 0 ||
          ann.class_id >= static_cast<int>(manifest.class_names.size())) {
        throw std::invalid_argument("manifest: class_id " +
                                    std::to_string(ann.class_id) +
                                    " outside class_names");
      }
    }
  }
}

DatasetManifest build_manifest(const GeneratedDataset& dataset) {
  DatasetManifest manifest;
  manifest.class_names = dataset.class_names;
  manifest.entries.reserve(dataset.records.size());
  for (const auto& rec : dataset.records) {
    ManifestEntry entry;
    entry.image_id = rec.image_id;
    entry.image_path = rec.image_path;
    entry.width = dataset.frame_width;
    entry.height = dataset.frame_height;
    entry.annotations = {rec.annotation};
    entry.scene_spec = rec.spec;
    manifest.entries.push_back(std::move(entry));
  }
  validate(manifest);
  return manifest;
}

void write_coco(const DatasetManifest& manifest, const std::filesystem::path& path) {
  validate(manifest);

  json categories = json::array();
  for (std::size_t i = 0; i < manifest.class_names.size(); ++i) {
    categories.push_back({{"id", i}, {"name", manifest.class_names[i]}});
  }

  json images = json::array();
  json annotations = json::array();
  std::size_t ann_id = 0;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& entry = manifest.entries[i];
    json img{{"id", i},
             {"name", entry.image_id},
             {"file_name", entry.image_path},
             {"width", entry.width},
             {"height", entry.height}};
    if (entry.scene_spec) img["scene"] = scene_to_json(*entry.scene_spec);
    images.push_back(std::move(img));

    for (const auto& ann : entry.annotations) {
      const double x = ann.bbox[0], y = ann.bbox[1];
      const double w = ann.bbox[2] - ann.bbox[0];
      const double h = ann.bbox[3] - ann.bbox[1];
      json a{{"id", ann_id++},
             {"image_id", i},
             {"category_id", ann.class_id},
             {"bbox", json::array({x, y, w, h})},
             {"area", w * h},
             {"iscrowd", 0}};
      if (!ann.mask.counts.empty()) {
        a["segmentation"] = {{"size", json::array({ann.mask.height, ann.mask.width})},
                             {"counts", ann.mask.counts}};
      }
      annotations.push_back(std::move(a));
    }
  }

  json root{{"info", {{"version", manifest.version}}},
            {"categories", std::move(categories)},
            {"images", std::move(images)},
            {"annotations", std::move(annotations)}};
  write_text_file(path, root.dump());
}

DatasetManifest read_coco(const std::filesystem::path& path) {
  const json root = parse_file(path);
  DatasetManifest manifest;
  try {
    if (root.contains("info") && root.at("info").contains("version")) {
      manifest.version = root.at("info").at("version").get<std::string>();
    }

    std::map<std::int64_t, int> category_index;
    if (root.contains("categories")) {
      std::vector<std::pair<std::int64_t, std::string>> cats;
      for (const auto& c : root.at("categories")) {
        cats.emplace_back(c.at("id").get<std::int64_t>(),
                          c.at("name").get<std::string>());
      }
      std::sort(cats.begin(), cats.end());
      for (const auto& [id, name] : cats) {
        category_index[id] = static_cast<int>(manifest.class_names.size());
        manifest.class_names.push_back(name);
      }
    }

    std::map<std::int64_t, std::size_t> entry_by_coco_id;
    for (const auto& img : root.at("images")) {
      ManifestEntry entry;
      const std::int64_t coco_id = img.at("id").get<std::int64_t>();
      entry.image_path = img.value("file_name", std::string{});
      if (img.contains("name")) {
        entry.image_id = img.at("name").get<std::string>();
      } else if (!entry.image_path.empty()) {
        entry.image_id = std::filesystem::path(entry.image_path).stem().string();
      } else {
        entry.image_id = std::to_string(coco_id);
      }
      entry.width = img.value("width", 0);
      entry.height = img.value("height", 0);
      if (img.contains("scene")) entry.scene_spec = scene_from_json(img.at("scene"));
      entry_by_coco_id[coco_id] = manifest.entries.size();
      manifest.entries.push_back(std::move(entry));
    }

    for (const auto& a : root.value("annotations", json::array())) {
      const std::int64_t img_id = a.at("image_id").get<std::int64_t>();
      const auto it = entry_by_coco_id.find(img_id);
      if (it == entry_by_coco_id.end()) {
        throw parse_error(path.string() + ": annotation references unknown image " +
                          std::to_string(img_id));
      }
      Annotation ann;
      const std::int64_t cat = a.at("category_id").get<std::int64_t>();
      const auto cit = category_index.find(cat);
      ann.class_id = cit != category_index.end()
                         ? cit->second
                         : static_cast<int>(cat);
      const auto bbox = a.at("bbox").get<std::array<double, 4>>();
      ann.bbox = {bbox[0], bbox[1], bbox[0] + bbox[2], bbox[1] + bbox[3]};
      if (a.contains("segmentation") && a.at("segmentation").is_object()) {
        const auto& seg = a.at("segmentation");
        const auto size = seg.at("size").get<std::array<int, 2>>();
        ann.mask.height = size[0];
        ann.mask.width = size[1];
        ann.mask.counts = seg.at("counts").get<std::vector<std::uint32_t>>();
      }
      ann.image_id = manifest.entries[it->second].image_id;
      manifest.entries[it->second].annotations.push_back(std::move(ann));
    }
  } catch (const json::exception& e) {
    throw parse_error(path.string() + ": " + e.what());
  }
  return manifest;
}

void write_yolo(const DatasetManifest& manifest, const std::filesystem::path& out_dir) {
  validate(manifest);
  std::filesystem::create_directories(out_dir / "labels");
  for (const auto& entry : manifest.entries) {
    if (entry.width <= 0 || entry.height <= 0) {
      throw std::invalid_argument("write_yolo: entry " + entry.image_id +
                                  " has no image dimensions");
    }
    std::string text;
    for (const auto& ann : entry.annotations) {
      const double cx = (ann.bbox[0] + ann.bbox[2]) / (2.0 * entry.width);
      const double cy = (ann.bbox[1] + ann.bbox[3]) / (2.0 * entry.height);
      const double w = (ann.bbox[2] - ann.bbox[0]) / entry.width;
      const double h = (ann.bbox[3] - ann.bbox[1]) / entry.height;
      char line[128];
      std::snprintf(line, sizeof(line), "%d %.6f %.6f %.6f %.6f\n",
                    ann.class_id, cx, cy, w, h);
      text += line;
    }
    const std::string stem =
        std::filesystem::path(entry.image_path.empty() ? entry.image_id
                                                       : entry.image_path)
            .stem()
            .string();
    write_text_file(out_dir / "labels" / (stem + ".txt"), text);
  }
}

SplitAssignment split_dataset(const DatasetManifest& manifest,
                              std::array<double, 3> ratios, std::uint64_t seed) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split_dataset: ratios must sum to 1");
  }
  const std::size_t n = manifest.entries.size();
  if (n < 3) {
    throw std::invalid_argument("split_dataset: need at least 3 images to populate all splits");
  }

  const auto perm = seeded_permutation(n, seed);
  const int n_test = round_half_up(ratios[2] * static_cast<double>(n));
  const int n_val = round_half_up(ratios[1] * static_cast<double>(n));
  const int n_train = static_cast<int>(n) - n_val - n_test;
  if (n_train < 0) throw std::invalid_argument("split_dataset: ratios leave no training data");

  SplitAssignment split;
  split.fraction_used = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& id = manifest.entries[perm[i]].image_id;
    if (i < static_cast<std::size_t>(n_train)) {
      split.train.push_back(id);
    } else if (i < static_cast<std::size_t>(n_train + n_val)) {
      split.val.push_back(id);
    } else {
      split.test.push_back(id);
    }
  }
  return split;
}

SplitAssignment subsample_train(const SplitAssignment& split, double fraction,
                                std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw std::invalid_argument("subsample_train: fraction must be in (0,1]");
  }
  const std::size_t n = split.train.size();
  const std::size_t keep =
      std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));

  // One permutation per seed; a fraction keeps a prefix of it, so smaller
  // fractions are always subsets of larger ones.
  const auto perm = seeded_permutation(n, seed);
  std::vector<std::size_t> kept(perm.begin(), perm.begin() + keep);
  std::sort(kept.begin(), kept.end());

  SplitAssignment out;
  out.val = split.val;
  out.test = split.test;
  out.fraction_used = fraction;
  out.train.reserve(keep);
  for (const std::size_t i : kept) out.train.push_back(split.train[i]);
  return out;
}

void write_split(const SplitAssignment& split, const std::filesystem::path& path) {
  json j{{"train", split.train},
         {"val", split.val},
         {"test", split.test},
         {"fraction_used", split.fraction_used}};
  write_text_file(path, j.dump(2) + "\n");
}

SplitAssignment read_split(const std::filesystem::path& path) {
  const json j = parse_file(path);
  try {
    SplitAssignment split;
    split.train = j.at("train").get<std::vector<std::string>>();
    split.val = j.at("val").get<std::vector<std::string>>();
    split.test = j.at("test").get<std::vector<std::string>>();
    split.fraction_used = j.value("fraction_used", 1.0);
    return split;
  } catch (const json::exception& e) {
    throw parse_error(path.string() + ": " + e.what());
  }
}

void write_manifest_jsonl(const std::vector<SceneRecord>& records,
                          const std::filesystem::path& path) {
  std::string text;
  for (const auto& rec : records) {
    json line = scene_to_json(rec.spec);
    line["image_id"] = rec.image_id;
    line["image_path"] = rec.image_path;
    text += line.dump();
    text += '\n';
  }
  write_text_file(path, text);
}

std::vector<SceneSpec> read_manifest_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  std::vector<SceneSpec> specs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      specs.push_back(scene_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw parse_error(path.string() + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return specs;
}

}  // namespace spacedet
