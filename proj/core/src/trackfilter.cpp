#include "spacedet/trackfilter.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

namespace spacedet {

namespace {

std::array<double, 2> center_of(const BBox& b) {
  return {(b[0] + b[2]) / 2.0, (b[1] + b[3]) / 2.0};
}

// Least-squares slope of centers vs frame index, per component.
std::optional<std::array<double, 2>> fit_velocity(const std::vector<Detection>& dets) {
  const std::size_t n = dets.size();
  if (n < 2) return std::nullopt;
  double mean_t = 0.0, mean_x = 0.0, mean_y = 0.0;
  for (const auto& d : dets) {
    const auto c = center_of(d.bbox);
    mean_t += d.frame_index;
    mean_x += c[0];
    mean_y += c[1];
  }
  mean_t /= n;
  mean_x /= n;
  mean_y /= n;
  double var_t = 0.0, cov_tx = 0.0, cov_ty = 0.0;
  for (const auto& d : dets) {
    const auto c = center_of(d.bbox);
    const double dt = d.frame_index - mean_t;
    var_t += dt * dt;
    cov_tx += dt * (c[0] - mean_x);
    cov_ty += dt * (c[1] - mean_y);
  }
  if (var_t <= 0.0) return std::nullopt;  // duplicate frame indices
  return std::array<double, 2>{cov_tx / var_t, cov_ty / var_t};
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// FFTW planning is not thread-safe.
std::mutex fftw_mutex;

}  // namespace

std::vector<Track> associate(const std::vector<std::vector<Detection>>& frames,
                             double gate_px) {
  if (!(gate_px > 0.0)) {
    throw std::invalid_argument("associate: gate_px must be positive");
  }

  struct OpenTrack {
    Track track;
    std::array<double, 2> last_center{0.0, 0.0};
  };
  std::vector<OpenTrack> open;

  for (std::size_t f = 0; f < frames.size(); ++f) {
    std::vector<bool> claimed(open.size(), false);
    for (const Detection& det : frames[f]) {
      const auto c = center_of(det.bbox);
      int best = -1;
      double best_dist = 0.0;
      for (std::size_t t = 0; t < open.size(); ++t) {
        if (claimed[t]) continue;
        auto predicted = open[t].last_center;
        if (open[t].track.velocity_px_per_frame) {
          const int dt = det.frame_index -
                         open[t].track.detections.back().frame_index;
          predicted[0] += (*open[t].track.velocity_px_per_frame)[0] * dt;
          predicted[1] += (*open[t].track.velocity_px_per_frame)[1] * dt;
        }
        const double dist = std::hypot(c[0] - predicted[0], c[1] - predicted[1]);
        if (dist > gate_px) continue;
        if (best < 0 || dist < best_dist) {
          best = static_cast<int>(t);
          best_dist = dist;
        }
      }
      if (best >= 0) {
        claimed[best] = true;
        open[best].track.detections.push_back(det);
        open[best].track.velocity_px_per_frame =
            fit_velocity(open[best].track.detections);
        open[best].last_center = c;
      } else {
        OpenTrack nt;
        nt.track.id = static_cast<int>(open.size());
        nt.track.detections.push_back(det);
        nt.last_center = c;
        open.push_back(std::move(nt));
        claimed.push_back(true);  // new tracks are not available in this frame
      }
    }
  }

  std::vector<Track> tracks;
  tracks.reserve(open.size());
  for (auto& ot : open) tracks.push_back(std::move(ot.track));
  return tracks;
}

FlowEstimate background_flow(const std::vector<Track>& tracks, FlowSource mode,
                             std::optional<std::array<double, 2>> config_flow) {
  FlowEstimate flow;
  flow.source = mode;
  if (mode == FlowSource::ephemeris_config) {
    if (!config_flow) {
      throw std::invalid_argument("background_flow: ephemeris_config mode needs a configured flow");
    }
    flow.velocity_px_per_frame = *config_flow;
    return flow;
  }

  std::vector<double> vx, vy;
  for (const auto& t : tracks) {
    if (t.velocity_px_per_frame) {
      vx.push_back((*t.velocity_px_per_frame)[0]);
      vy.push_back((*t.velocity_px_per_frame)[1]);
    }
  }
  if (vx.size() < 3) {
    throw std::invalid_argument(
        "background_flow: median_of_tracks needs at least 3 tracks with velocity, have " +
        std::to_string(vx.size()));
  }
  flow.velocity_px_per_frame = {median_of(std::move(vx)), median_of(std::move(vy))};
  return flow;
}

const char* track_label_name(TrackLabel label) {
  switch (label) {
    case TrackLabel::target: return "target";
    case TrackLabel::background: return "background";
    case TrackLabel::unknown: return "unknown";
  }
  return "unknown";
}

std::vector<TrackLabel> classify(const std::vector<Track>& tracks,
                                 const FlowEstimate& flow,
                                 double residual_thresh_px) {
  if (!(residual_thresh_px > 0.0)) {
    throw std::invalid_argument("classify: residual threshold must be positive");
  }
  std::vector<TrackLabel> labels;
  labels.reserve(tracks.size());
  for (const auto& t : tracks) {
    if (!t.velocity_px_per_frame) {
      labels.push_back(TrackLabel::unknown);
      continue;
    }
    const double rx =
        (*t.velocity_px_per_frame)[0] - flow.velocity_px_per_frame[0];
    const double ry =
        (*t.velocity_px_per_frame)[1] - flow.velocity_px_per_frame[1];
    labels.push_back(std::hypot(rx, ry) > residual_thresh_px
                         ? TrackLabel::target
                         : TrackLabel::background);
  }
  return labels;
}

std::array<double, 2> phase_correlate(const Frame& a, const Frame& b) {
  validate(a);
  validate(b);
  if (a.channels != 1 || b.channels != 1) {
    throw std::invalid_argument("phase_correlate: mono frames only");
  }
  if (a.width != b.width || a.height != b.height) {
    throw shape_error("phase_correlate: frame dimensions differ");
  }
  const int w = a.width, h = a.height;
  const int spec_w = w / 2 + 1;
  const std::size_t n_real = static_cast<std::size_t>(w) * h;
  const std::size_t n_spec = static_cast<std::size_t>(spec_w) * h;

  std::vector<double> in_a(a.data), in_b(b.data);
  std::vector<std::complex<double>> fa(n_spec), fb(n_spec);
  std::vector<double> corr(n_real);

  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_plan pa = fftw_plan_dft_r2c_2d(
        h, w, in_a.data(), reinterpret_cast<fftw_complex*>(fa.data()),
        FFTW_ESTIMATE);
    fftw_plan pb = fftw_plan_dft_r2c_2d(
        h, w, in_b.data(), reinterpret_cast<fftw_complex*>(fb.data()),
        FFTW_ESTIMATE);
    fftw_execute(pa);
    fftw_execute(pb);
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);

    // Normalized cross-power spectrum, then inverse transform.
    for (std::size_t i = 0; i < n_spec; ++i) {
      const std::complex<double> cross = fb[i] * std::conj(fa[i]);
      const double mag = std::abs(cross);
      fa[i] = mag > 1e-15 ? cross / mag : std::complex<double>(0.0, 0.0);
    }
    fftw_plan pi = fftw_plan_dft_c2r_2d(
        h, w, reinterpret_cast<fftw_complex*>(fa.data()), corr.data(),
        FFTW_ESTIMATE);
    fftw_execute(pi);
    fftw_destroy_plan(pi);
  }

  std::size_t peak = 0;
  for (std::size_t i = 1; i < n_real; ++i) {
    if (corr[i] > corr[peak]) peak = i;
  }
  int dx = static_cast<int>(peak % w);
  int dy = static_cast<int>(peak / w);
  if (dx > w / 2) dx -= w;
  if (dy > h / 2) dy -= h;
  return {static_cast<double>(dx), static_cast<double>(dy)};
}

}  // namespace spacedet
