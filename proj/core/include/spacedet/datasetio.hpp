#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spacedet/annotation.hpp"
#include "spacedet/scene.hpp"

namespace spacedet {

struct ManifestEntry {
  std::string image_id;
  std::string image_path;
  int width = 0;
  int height = 0;
  std::vector<Annotation> annotations;
  std::optional<SceneSpec> scene_spec;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> class_names;
  std::string version = "1";
};

/// Throws std::invalid_argument on duplicate image ids or class ids outside
/// class_names.
void validate(const DatasetManifest& manifest);

DatasetManifest build_manifest(const GeneratedDataset& dataset);

/// COCO-style JSON interchange (images / annotations / categories arrays,
/// uncompressed RLE segmentation). Write-then-read preserves boxes, masks and
/// class ids exactly; unknown fields in foreign files are ignored.
void write_coco(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_coco(const std::filesystem::path& path);

/// One "class cx cy w h" line per annotation, normalized to [0,1] with six
/// decimals, under out_dir/labels/ mirroring the images/ layout. Images
/// without annotations get an empty (but present) file.
void write_yolo(const DatasetManifest& manifest, const std::filesystem::path& out_dir);

struct SplitAssignment {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
  double fraction_used = 1.0;
};

/// Seeded-permutation split. test = round(r_test*N), val = round(r_val*N)
/// (half-up), train takes the remainder, so the three sizes always sum to N.
SplitAssignment split_dataset(const DatasetManifest& manifest,
                              std::array<double, 3> ratios, std::uint64_t seed);

/// Keeps ceil(fraction * |train|) train ids. Subsets are nested for a fixed
/// seed: the kept set at a smaller fraction is contained in every larger one.
/// val/test pass through untouched.
SplitAssignment subsample_train(const SplitAssignment& split, double fraction,
                                std::uint64_t seed);

void write_split(const SplitAssignment& split, const std::filesystem::path& path);
SplitAssignment read_split(const std::filesystem::path& path);

/// manifest.jsonl: one SceneSpec per line, in scene order.
void write_manifest_jsonl(const std::vector<SceneRecord>& records,
                          const std::filesystem::path& path);
std::vector<SceneSpec> read_manifest_jsonl(const std::filesystem::path& path);

const char* blend_mode_name(BlendMode mode);
BlendMode blend_mode_from_name(const std::string& name);
const char* kernel_name(Kernel kernel);
Kernel kernel_from_name(const std::string& name);

}  // namespace spacedet
