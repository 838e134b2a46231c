#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "spacedet/datasetio.hpp"
#include "spacedet/metrics.hpp"
#include "spacedet/scene.hpp"

namespace spacedet::cli {

/// Parses the synthesis config JSON; asset paths are resolved relative to the
/// config file's directory.
SceneGenConfig load_scene_config(const std::filesystem::path& path);

nlohmann::json scene_config_to_json(const SceneGenConfig& config);

/// Every command writes the fully-resolved settings next to its outputs so a
/// run can be reproduced from the artifacts alone.
void write_resolved_config(const std::filesystem::path& out_dir,
                           const nlohmann::json& config);

/// JSONL detections: one {"image_id", "class_id", "bbox", "score",
/// "frame_index"} object per line; bbox is [x_min, y_min, x_max, y_max].
std::vector<Detection> read_detections_jsonl(const std::filesystem::path& path);

nlohmann::json parse_json_file(const std::filesystem::path& path);

}  // namespace spacedet::cli
