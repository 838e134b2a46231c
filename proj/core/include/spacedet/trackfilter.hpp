#pragma once

#include <array>
#include <optional>
#include <vector>

#include "spacedet/frame.hpp"
#include "spacedet/metrics.hpp"

namespace spacedet {

/// Detections of one object associated across frames. The velocity is the
/// least-squares line fit of box centers against frame index, defined once
/// the track spans at least two frames.
struct Track {
  int id = 0;
  std::vector<Detection> detections;
  std::optional<std::array<double, 2>> velocity_px_per_frame;

  int length() const { return static_cast<int>(detections.size()); }
};

/// Greedy nearest-neighbor association. Detections are processed in index
/// order; each links to the closest unclaimed track whose predicted position
/// (last center + fitted velocity) lies within gate_px, ties going to the
/// lowest track id. Unmatched detections start new tracks.
std::vector<Track> associate(const std::vector<std::vector<Detection>>& frames,
                             double gate_px);

enum class FlowSource { ephemeris_config, median_of_tracks };

struct FlowEstimate {
  std::array<double, 2> velocity_px_per_frame{0.0, 0.0};
  FlowSource source = FlowSource::ephemeris_config;
};

/// ephemeris_config passes config_flow through; median_of_tracks takes the
/// component-wise median over tracks with a velocity (at least 3 required).
FlowEstimate background_flow(const std::vector<Track>& tracks, FlowSource mode,
                             std::optional<std::array<double, 2>> config_flow = {});

enum class TrackLabel { target, background, unknown };
const char* track_label_name(TrackLabel label);

/// A track is a target when its velocity residual against the background flow
/// exceeds residual_thresh_px (L2 norm). Tracks without a velocity (single
/// frame) come back unknown.
std::vector<TrackLabel> classify(const std::vector<Track>& tracks,
                                 const FlowEstimate& flow,
                                 double residual_thresh_px);

/// Global translation estimate between two mono frames by phase correlation
/// (FFT cross-power spectrum peak). Returns (dx, dy) such that moving `a` by
/// that many pixels best aligns it with `b`. Useful as an expected-flow
/// source when no background detections are available.
std::array<double, 2> phase_correlate(const Frame& a, const Frame& b);

}  // namespace spacedet
