#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "commands.hpp"
#include "common.hpp"
#include "spacedet/trackfilter.hpp"

namespace spacedet::cli {

namespace {

using nlohmann::json;

const char* flow_source_name(FlowSource source) {
  return source == FlowSource::median_of_tracks ? "median_of_tracks"
                                                : "ephemeris_config";
}

}  // namespace

int cmd_filter(const FilterArgs& args) {
  const std::vector<Detection> dets = read_detections_jsonl(args.dets_path);

  std::map<int, std::vector<Detection>> by_frame;
  for (const auto& d : dets) by_frame[d.frame_index].push_back(d);
  std::vector<std::vector<Detection>> frames;
  frames.reserve(by_frame.size());
  for (auto& [idx, fd] : by_frame) frames.push_back(std::move(fd));

  const std::vector<Track> tracks = associate(frames, args.gate_px);

  FlowEstimate flow;
  if (args.flow_mode == "median") {
    flow = background_flow(tracks, FlowSource::median_of_tracks);
  } else {
    if (args.flow.size() != 2) {
      throw std::invalid_argument(
          "filter: provide --flow vx vy or --flow-mode median");
    }
    flow = background_flow({}, FlowSource::ephemeris_config,
                           std::array<double, 2>{args.flow[0], args.flow[1]});
  }

  const std::vector<TrackLabel> labels =
      classify(tracks, flow, args.residual_thresh_px);

  int n_target = 0, n_background = 0, n_unknown = 0;
  json jtracks = json::array();
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const Track& t = tracks[i];
    switch (labels[i]) {
      case TrackLabel::target: ++n_target; break;
      case TrackLabel::background: ++n_background; break;
      case TrackLabel::unknown: ++n_unknown; break;
    }
    json jdets = json::array();
    for (const auto& d : t.detections) {
      jdets.push_back({{"frame_index", d.frame_index},
                       {"bbox", d.bbox},
                       {"score", d.score},
                       {"image_id", d.image_id}});
    }
    json jt{{"id", t.id},
            {"label", track_label_name(labels[i])},
            {"length", t.length()},
            {"detections", std::move(jdets)}};
    if (t.velocity_px_per_frame) {
      jt["velocity_px_per_frame"] = *t.velocity_px_per_frame;
    }
    jtracks.push_back(std::move(jt));
  }

  const std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);
  json root{{"flow",
             {{"source", flow_source_name(flow.source)},
              {"velocity_px_per_frame", flow.velocity_px_per_frame}}},
            {"gate_px", args.gate_px},
            {"residual_thresh_px", args.residual_thresh_px},
            {"summary",
             {{"target", n_target},
              {"background", n_background},
              {"unknown", n_unknown}}},
            {"tracks", std::move(jtracks)}};
  {
    std::ofstream f(out / "tracks.json", std::ios::binary);
    if (!f) throw io_error("cannot write: " + (out / "tracks.json").string());
    f << root.dump(2) << "\n";
  }
  json resolved{{"command", "filter"},
                {"dets", args.dets_path},
                {"flow_mode", args.flow_mode},
                {"gate_px", args.gate_px},
                {"residual_thresh_px", args.residual_thresh_px}};
  if (args.flow_mode != "median") {
    resolved["background_flow"] = flow.velocity_px_per_frame;
  }
  write_resolved_config(out, resolved);

  std::printf("filter: %zu tracks (%d target, %d background, %d unknown), flow (%.3f, %.3f)\n",
              tracks.size(), n_target, n_background, n_unknown,
              flow.velocity_px_per_frame[0], flow.velocity_px_per_frame[1]);
  return 0;
}

}  // namespace spacedet::cli
