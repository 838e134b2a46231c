#include "common.hpp"

#include <fstream>

#include "spacedet/error.hpp"

namespace spacedet::cli {

using nlohmann::json;

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw parse_error(path.string() + ": " + e.what());
  }
}

SceneGenConfig load_scene_config(const std::filesystem::path& path) {
  const json j = parse_json_file(path);
  const auto base = std::filesystem::absolute(path).parent_path();
  auto resolve = [&](const std::string& p) {
    if (p.empty()) return p;
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  SceneGenConfig cfg;
  try {
    if (j.contains("camera")) {
      const auto& cam = j.at("camera");
      cfg.gsd_m = cam.value("gsd_m", cfg.gsd_m);
      cfg.altitude_m = cam.value("altitude_m", cfg.altitude_m);
      cfg.width_px = cam.value("width_px", cfg.width_px);
      cfg.height_px = cam.value("height_px", cfg.height_px);
    }
    if (j.contains("distance_range_m")) {
      cfg.distance_range_m = j.at("distance_range_m").get<std::array<double, 2>>();
    }
    cfg.p_multiply = j.value("p_multiply", cfg.p_multiply);
    if (j.contains("contrast_jitter_range")) {
      cfg.contrast_jitter_range =
          j.at("contrast_jitter_range").get<std::array<double, 2>>();
    }
    cfg.resample_kernel =
        kernel_from_name(j.value("resample_kernel", std::string("bilinear")));
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("band")) {
      cfg.band = j.at("band").get<std::string>() == "rgb" ? Band::RGB : Band::LWIR;
    }

    const auto& assets = j.at("assets");
    for (const auto& bg : assets.at("backgrounds")) {
      BackgroundAsset asset;
      asset.id = bg.at("id").get<std::string>();
      asset.path = resolve(bg.at("path").get<std::string>());
      asset.gsd_m = bg.value("gsd_m", 0.0);
      cfg.backgrounds.push_back(std::move(asset));
    }
    for (const auto& sp : assets.at("sprites")) {
      SpriteAsset asset;
      asset.id = sp.at("id").get<std::string>();
      asset.path = resolve(sp.at("path").get<std::string>());
      asset.mask_path = resolve(sp.value("mask_path", std::string{}));
      asset.native_gsd_m = sp.at("native_gsd_m").get<double>();
      cfg.sprites.push_back(std::move(asset));
    }
  } catch (const json::exception& e) {
    throw parse_error(path.string() + ": " + e.what());
  }
  return cfg;
}

json scene_config_to_json(const SceneGenConfig& config) {
  json backgrounds = json::array();
  for (const auto& bg : config.backgrounds) {
    backgrounds.push_back({{"id", bg.id}, {"path", bg.path}, {"gsd_m", bg.gsd_m}});
  }
  json sprites = json::array();
  for (const auto& sp : config.sprites) {
    json s{{"id", sp.id}, {"path", sp.path}, {"native_gsd_m", sp.native_gsd_m}};
    if (!sp.mask_path.empty()) s["mask_path"] = sp.mask_path;
    sprites.push_back(std::move(s));
  }
  return json{{"camera",
               {{"gsd_m", config.gsd_m},
                {"altitude_m", config.altitude_m},
                {"width_px", config.width_px},
                {"height_px", config.height_px}}},
              {"band", config.band == Band::RGB ? "rgb" : "lwir"},
              {"distance_range_m", config.distance_range_m},
              {"p_multiply", config.p_multiply},
              {"contrast_jitter_range", config.contrast_jitter_range},
              {"resample_kernel", kernel_name(config.resample_kernel)},
              {"assets", {{"backgrounds", backgrounds}, {"sprites", sprites}}},
              {"seed", config.seed}};
}

void write_resolved_config(const std::filesystem::path& out_dir,
                           const json& config) {
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / "resolved_config.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write: " + path.string());
  out << config.dump(2) << "\n";
}

std::vector<Detection> read_detections_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());
  std::vector<Detection> dets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      Detection d;
      d.image_id = j.value("image_id", std::string{});
      d.class_id = j.value("class_id", 0);
      d.bbox = j.at("bbox").get<BBox>();
      d.score = j.value("score", 0.0);
      d.frame_index = j.value("frame_index", 0);
      dets.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw parse_error(path.string() + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return dets;
}

}  // namespace spacedet::cli
