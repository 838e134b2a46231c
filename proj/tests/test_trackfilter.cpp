#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spacedet/trackfilter.hpp"
#include "testutil.hpp"

using namespace spacedet;

namespace {

Detection det_at(double cx, double cy, int frame, double half = 2.0) {
  Detection d;
  d.image_id = "f" + std::to_string(frame);
  d.frame_index = frame;
  d.bbox = {cx - half, cy - half, cx + half, cy + half};
  d.score = 0.9;
  return d;
}

Track track_with_velocity(int id, double vx, double vy) {
  Track t;
  t.id = id;
  t.detections = {det_at(0, 0, 0), det_at(vx, vy, 1)};
  t.velocity_px_per_frame = {{vx, vy}};
  return t;
}

}  // namespace

TEST_CASE("a steadily moving detection forms one track with the fitted velocity") {
  std::vector<std::vector<Detection>> frames;
  for (int f = 0; f < 5; ++f) frames.push_back({det_at(10.0 + 2.0 * f, 40.0, f)});
  const auto tracks = associate(frames, 10.0);
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].length() == 5);
  REQUIRE(tracks[0].velocity_px_per_frame.has_value());
  CHECK((*tracks[0].velocity_px_per_frame)[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK((*tracks[0].velocity_px_per_frame)[1] == doctest::Approx(0.0));
}

TEST_CASE("detections outside the gate start separate tracks") {
  std::vector<std::vector<Detection>> frames = {
      {det_at(0, 0, 0)}, {det_at(100, 0, 1)}};
  const auto tracks = associate(frames, 10.0);
  REQUIRE(tracks.size() == 2);
  CHECK(tracks[0].length() == 1);
  CHECK(tracks[1].length() == 1);
  CHECK(!tracks[0].velocity_px_per_frame.has_value());
}

TEST_CASE("a single frame yields one velocity-less track per detection") {
  const auto tracks = associate({{det_at(0, 0, 0), det_at(50, 50, 0)}}, 5.0);
  REQUIRE(tracks.size() == 2);
  for (const auto& t : tracks) {
    CHECK(t.length() == 1);
    CHECK(!t.velocity_px_per_frame.has_value());
  }
}

TEST_CASE("association predicts with the fitted velocity, not the last center") {
  // The first link must fit the gate on its own (no velocity yet); after
  // that the fitted velocity carries the prediction. The frame-2 detection
  // is 6 px from the last center but on the predicted line, so a 3.5 px
  // gate only works if the predictor extrapolates.
  std::vector<std::vector<Detection>> frames = {
      {det_at(10, 10, 0)}, {det_at(13, 10, 1)}, {det_at(19, 10, 2)}};
  const auto tracks = associate(frames, 3.5);
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].length() == 3);
}

TEST_CASE("frame gaps extrapolate the prediction across missing frames") {
  // Velocity 2.5 px/frame; the frame-3 detection sits two frames ahead of
  // the last link (5 px from the last center, 0 px from the prediction).
  std::vector<std::vector<Detection>> frames = {
      {det_at(10, 10, 0)}, {det_at(12.5, 10, 1)}, {}, {det_at(17.5, 10, 3)}};
  const auto tracks = associate(frames, 3.0);
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].length() == 3);
}

TEST_CASE("background_flow passes config flow through and medians track velocities") {
  const FlowEstimate cfg =
      background_flow({}, FlowSource::ephemeris_config, {{5.0, 0.0}});
  CHECK(cfg.velocity_px_per_frame == std::array<double, 2>{5.0, 0.0});
  CHECK(cfg.source == FlowSource::ephemeris_config);

  // Odd count: the middle order statistic exactly rejects the outlier.
  const std::vector<Track> odd = {track_with_velocity(0, 5.0, 0.0),
                                  track_with_velocity(1, 5.1, 0.1),
                                  track_with_velocity(2, 4.9, -0.1)};
  const FlowEstimate med = background_flow(odd, FlowSource::median_of_tracks);
  CHECK(med.velocity_px_per_frame[0] == 5.0);
  CHECK(med.velocity_px_per_frame[1] == 0.0);

  // Even count: mean of the two middle order statistics per component.
  // {1, 4.9, 5, 5.1} -> 4.95 and {-0.1, 0, 0.1, 2} -> 0.05.
  const std::vector<Track> even = {track_with_velocity(0, 5.0, 0.0),
                                   track_with_velocity(1, 5.1, 0.1),
                                   track_with_velocity(2, 4.9, -0.1),
                                   track_with_velocity(3, 1.0, 2.0)};
  const FlowEstimate med4 = background_flow(even, FlowSource::median_of_tracks);
  CHECK(med4.velocity_px_per_frame[0] == doctest::Approx(4.95).epsilon(1e-12));
  CHECK(med4.velocity_px_per_frame[1] == doctest::Approx(0.05).epsilon(1e-12));

  const std::vector<Track> two = {track_with_velocity(0, 5.0, 0.0),
                                  track_with_velocity(1, 5.1, 0.1)};
  CHECK_THROWS_AS(background_flow(two, FlowSource::median_of_tracks),
                  std::invalid_argument);
  CHECK_THROWS_AS(background_flow(odd, FlowSource::ephemeris_config),
                  std::invalid_argument);
}

TEST_CASE("classification thresholds the velocity residual") {
  const FlowEstimate flow{{5.0, 0.0}, FlowSource::ephemeris_config};
  std::vector<Track> tracks = {track_with_velocity(0, 1.0, 2.0),
                               track_with_velocity(1, 5.1, 0.05),
                               track_with_velocity(2, 5.0, 0.0)};
  Track single;
  single.id = 3;
  single.detections = {det_at(0, 0, 0)};
  tracks.push_back(single);

  // Residuals: ||(-4,2)|| = 4.4721, ||(0.1,0.05)|| = 0.1118, 0.
  const auto labels = classify(tracks, flow, 1.0);
  REQUIRE(labels.size() == 4);
  CHECK(labels[0] == TrackLabel::target);
  CHECK(labels[1] == TrackLabel::background);
  CHECK(labels[2] == TrackLabel::background);
  CHECK(labels[3] == TrackLabel::unknown);

  CHECK_THROWS_AS(classify(tracks, flow, 0.0), std::invalid_argument);
}

TEST_CASE("classification is invariant under a shared velocity offset") {
  for (int trial = 0; trial < 100; ++trial) {
    SplitMix64 rng(3100 + trial);
    std::vector<Track> tracks;
    const int n = 2 + static_cast<int>(rng.below(6));
    for (int i = 0; i < n; ++i) {
      tracks.push_back(track_with_velocity(i, rng.uniform(-6, 6), rng.uniform(-6, 6)));
    }
    const FlowEstimate flow{{rng.uniform(-6, 6), rng.uniform(-6, 6)},
                            FlowSource::ephemeris_config};
    const double thresh = rng.uniform(0.1, 4.0);
    const auto before = classify(tracks, flow, thresh);

    const std::array<double, 2> offset{rng.uniform(-20, 20), rng.uniform(-20, 20)};
    std::vector<Track> shifted = tracks;
    for (auto& t : shifted) {
      (*t.velocity_px_per_frame)[0] += offset[0];
      (*t.velocity_px_per_frame)[1] += offset[1];
    }
    const FlowEstimate shifted_flow{{flow.velocity_px_per_frame[0] + offset[0],
                                     flow.velocity_px_per_frame[1] + offset[1]},
                                    FlowSource::ephemeris_config};
    CHECK(classify(shifted, shifted_flow, thresh) == before);
  }
}

TEST_CASE("synthetic sequences: background moves with the flow, target deviates") {
  // 10 randomized sequences; every background detection moves exactly with
  // the configured flow (5,0) and the single target deviates by more than
  // the threshold. Classification must be perfect.
  const std::array<double, 2> flow_v{5.0, 0.0};
  for (int seq = 0; seq < 10; ++seq) {
    SplitMix64 rng(5200 + seq);
    const int n_background = 3 + static_cast<int>(rng.below(6));
    const int n_frames = 4 + static_cast<int>(rng.below(4));

    std::vector<std::array<double, 2>> starts;
    for (int b = 0; b <= n_background; ++b) {
      starts.push_back({60.0 * b + rng.uniform(0, 20), 40.0 * (b % 3) + rng.uniform(0, 20)});
    }
    // Target deviation well above the 1 px/frame threshold.
    const double angle = rng.uniform(0.0, 6.28);
    const std::array<double, 2> target_v{5.0 + 2.5 * std::cos(angle),
                                         2.5 * std::sin(angle)};

    std::vector<std::vector<Detection>> frames(n_frames);
    for (int f = 0; f < n_frames; ++f) {
      for (int b = 0; b < n_background; ++b) {
        frames[f].push_back(
            det_at(starts[b][0] + flow_v[0] * f, starts[b][1] + flow_v[1] * f, f));
      }
      frames[f].push_back(det_at(starts[n_background][0] + target_v[0] * f,
                                 starts[n_background][1] + target_v[1] * f, f));
    }

    const auto tracks = associate(frames, 8.0);
    REQUIRE(tracks.size() == static_cast<std::size_t>(n_background + 1));
    const FlowEstimate flow{flow_v, FlowSource::ephemeris_config};
    const auto labels = classify(tracks, flow, 1.0);

    int targets = 0;
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      REQUIRE(tracks[t].velocity_px_per_frame.has_value());
      const auto v = *tracks[t].velocity_px_per_frame;
      const bool is_target = std::hypot(v[0] - flow_v[0], v[1] - flow_v[1]) > 1.0;
      CHECK((labels[t] == TrackLabel::target) == is_target);
      targets += labels[t] == TrackLabel::target;
    }
    CHECK(targets == 1);
  }
}

TEST_CASE("median flow also separates the target on the synthetic sequence") {
  std::vector<std::vector<Detection>> frames(5);
  for (int f = 0; f < 5; ++f) {
    frames[f].push_back(det_at(10.0 + 5.0 * f, 10.0, f));
    frames[f].push_back(det_at(10.0 + 5.0 * f, 60.0, f));
    frames[f].push_back(det_at(10.0 + 5.0 * f, 110.0, f));
    frames[f].push_back(det_at(10.0 + 1.0 * f, 160.0, f));  // target
  }
  const auto tracks = associate(frames, 8.0);
  REQUIRE(tracks.size() == 4);
  const FlowEstimate flow = background_flow(tracks, FlowSource::median_of_tracks);
  CHECK(flow.velocity_px_per_frame[0] == doctest::Approx(5.0));
  const auto labels = classify(tracks, flow, 1.0);
  CHECK(labels[3] == TrackLabel::target);
  CHECK(labels[0] == TrackLabel::background);
}

TEST_CASE("association is independent of within-frame detection order") {
  // Three well-separated tracks with unique nearest neighbors; shuffling the
  // detections inside each frame must not change the recovered tracks.
  auto build = [](const std::vector<int>& order0, const std::vector<int>& order1) {
    const double xs[3] = {10.0, 100.0, 200.0};
    std::vector<std::vector<Detection>> frames(4);
    for (int f = 0; f < 4; ++f) {
      const auto& order = (f % 2) ? order1 : order0;
      for (const int t : order) {
        frames[f].push_back(det_at(xs[t] + 3.0 * f, 20.0 + 10.0 * t, f));
      }
    }
    return associate(frames, 6.0);
  };

  const auto a = build({0, 1, 2}, {0, 1, 2});
  const auto b = build({2, 0, 1}, {1, 2, 0});
  REQUIRE(a.size() == 3);
  REQUIRE(b.size() == 3);

  auto canonical = [](std::vector<Track> tracks) {
    std::sort(tracks.begin(), tracks.end(), [](const Track& x, const Track& y) {
      return x.detections.front().bbox[0] < y.detections.front().bbox[0];
    });
    return tracks;
  };
  const auto ca = canonical(a);
  const auto cb = canonical(b);
  for (int t = 0; t < 3; ++t) {
    CHECK(ca[t].length() == cb[t].length());
    CHECK((*ca[t].velocity_px_per_frame)[0] ==
          doctest::Approx((*cb[t].velocity_px_per_frame)[0]).epsilon(1e-12));
    for (int f = 0; f < 4; ++f) {
      CHECK(ca[t].detections[f].bbox == cb[t].detections[f].bbox);
    }
  }
}

TEST_CASE("phase correlation recovers an integer cyclic shift") {
  const int n = 64;
  const Frame a = testutil::random_frame(n, n, 1, 321);
  const int dx = 3, dy = -2;
  Frame b = a;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      b.at(r, c) = a.at(((r - dy) % n + n) % n, ((c - dx) % n + n) % n);
    }
  }
  const auto shift = phase_correlate(a, b);
  CHECK(shift[0] == doctest::Approx(3.0));
  CHECK(shift[1] == doctest::Approx(-2.0));

  const Frame small = testutil::random_frame(8, 8, 1, 1);
  CHECK_THROWS_AS(phase_correlate(a, small), shape_error);
}
