#include <cstdio>
#include <filesystem>

#include "commands.hpp"
#include "common.hpp"
#include "spacedet/datasetio.hpp"
#include "spacedet/scene.hpp"

namespace spacedet::cli {

int cmd_synth(const SynthArgs& args) {
  SceneGenConfig config = load_scene_config(args.config_path);
  const std::uint64_t seed = args.seed_given ? args.seed : config.seed;
  config.seed = seed;

  const std::filesystem::path out(args.out_dir);
  GeneratedDataset dataset =
      generate_dataset(config, args.n_scenes, seed, out, args.jobs);

  const DatasetManifest manifest = build_manifest(dataset);
  write_coco(manifest, out / "annotations" / "coco.json");
  write_manifest_jsonl(dataset.records, out / "manifest.jsonl");

  nlohmann::json resolved = scene_config_to_json(config);
  resolved["n_scenes"] = args.n_scenes;
  resolved["jobs"] = args.jobs;
  write_resolved_config(out, resolved);

  std::printf("synth: wrote %zu images (%dx%d) to %s\n", dataset.records.size(),
              dataset.frame_width, dataset.frame_height, out.string().c_str());
  return 0;
}

}  // namespace spacedet::cli
