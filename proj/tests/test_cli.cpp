#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "spacedet/datasetio.hpp"
#include "spacedet/raster_io.hpp"
#include "testutil.hpp"

using namespace spacedet;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(SPACEDET_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  char buf[512];
  while (std::fgets(buf, sizeof(buf), pipe)) output += buf;
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

// Minimal but realistic synthesis setup: a random background and a sprite
// whose zero border becomes transparent via the intensity rule.
std::filesystem::path write_synth_fixture(const std::filesystem::path& dir) {
  write_raster(dir / "bg.png", testutil::random_frame(600, 480, 1, 1001));
  Frame sprite = Frame::constant(48, 48, 1, 0.0);
  for (int r = 6; r < 42; ++r) {
    for (int c = 6; c < 42; ++c) sprite.at(r, c) = 0.55 + 0.4 * (((r / 3) + (c / 3)) % 2);
  }
  write_raster(dir / "sprite.png", sprite);

  const json cfg{
      {"camera",
       {{"gsd_m", 156.0}, {"altitude_m", 456000.0}, {"width_px", 320}, {"height_px", 256}}},
      {"distance_range_m", {20.0, 150.0}},
      {"p_multiply", 0.5},
      {"contrast_jitter_range", {0.8, 1.2}},
      {"resample_kernel", "bilinear"},
      {"assets",
       {{"backgrounds", {{{"id", "bg0"}, {"path", "bg.png"}, {"gsd_m", 156.0}}}},
        {"sprites", {{{"id", "craft"}, {"path", "sprite.png"}, {"native_gsd_m", 0.012}}}}}},
      {"seed", 1}};
  std::ofstream f(dir / "config.json");
  f << cfg.dump(2);
  return dir / "config.json";
}

DatasetManifest simple_gt_manifest() {
  DatasetManifest m;
  m.class_names = {"spacecraft"};
  for (int i = 0; i < 2; ++i) {
    ManifestEntry e;
    e.image_id = "im" + std::to_string(i);
    e.image_path = "images/im" + std::to_string(i) + ".png";
    e.width = 200;
    e.height = 150;
    Annotation a;
    a.class_id = 0;
    a.image_id = e.image_id;
    a.bbox = {10.0 + i * 40, 20.0, 60.0 + i * 40, 80.0};
    e.annotations.push_back(a);
    m.entries.push_back(e);
  }
  return m;
}

}  // namespace

TEST_CASE("synth runs are reproducible across reruns, worker counts, and the resolved config") {
  const auto dir = testutil::scratch_dir("cli_synth");
  const auto cfg = write_synth_fixture(dir);

  const auto a = run_cli("synth -c " + cfg.string() + " --n 8 --seed 1 --out " +
                         (dir / "a").string());
  REQUIRE(a.exit_code == 0);
  const auto b = run_cli("synth -c " + cfg.string() + " --n 8 --seed 1 --out " +
                         (dir / "b").string());
  REQUIRE(b.exit_code == 0);
  const auto c = run_cli("synth -c " + cfg.string() + " --n 8 --seed 1 --jobs 8 --out " +
                         (dir / "c").string());
  REQUIRE(c.exit_code == 0);

  const auto bytes = [&](const char* run, const char* rel) {
    return testutil::read_file_bytes(dir / run / rel);
  };
  CHECK(bytes("a", "manifest.jsonl") == bytes("b", "manifest.jsonl"));
  CHECK(bytes("a", "manifest.jsonl") == bytes("c", "manifest.jsonl"));
  CHECK(bytes("a", "annotations/coco.json") == bytes("b", "annotations/coco.json"));
  CHECK(bytes("a", "annotations/coco.json") == bytes("c", "annotations/coco.json"));
  CHECK(bytes("a", "images/000003.png") == bytes("c", "images/000003.png"));

  // The emitted resolved config reproduces the run byte-for-byte.
  const auto d = run_cli("synth -c " + (dir / "a" / "resolved_config.json").string() +
                         " --n 8 --seed 1 --out " + (dir / "d").string());
  REQUIRE(d.exit_code == 0);
  CHECK(bytes("a", "manifest.jsonl") == bytes("d", "manifest.jsonl"));

  std::filesystem::remove_all(dir);
}

TEST_CASE("synth exits 3 naming the missing asset") {
  const auto dir = testutil::scratch_dir("cli_synth_err");
  const auto cfg = write_synth_fixture(dir);
  std::filesystem::remove(dir / "sprite.png");
  const auto r = run_cli("synth -c " + cfg.string() + " --n 2 --seed 1 --out " +
                         (dir / "out").string());
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("sprite.png") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("synth exits 2 on a malformed config") {
  const auto dir = testutil::scratch_dir("cli_synth_cfg");
  std::ofstream(dir / "bad.json") << "{ not json";
  const auto r = run_cli("synth -c " + (dir / "bad.json").string() +
                         " --n 1 --seed 1 --out " + (dir / "out").string());
  CHECK(r.exit_code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("eval det scores a perfect detector at AP 1.0 for both thresholds") {
  const auto dir = testutil::scratch_dir("cli_eval");
  const DatasetManifest gt = simple_gt_manifest();
  write_coco(gt, dir / "gt.json");
  {
    std::ofstream dets(dir / "dets.jsonl");
    for (const auto& e : gt.entries) {
      const auto& b = e.annotations[0].bbox;
      dets << json{{"image_id", e.image_id},
                   {"class_id", 0},
                   {"bbox", b},
                   {"score", 0.9}}
                  .dump()
           << "\n";
    }
  }
  const auto r = run_cli("eval --task det --dets " + (dir / "dets.jsonl").string() +
                         " --gt " + (dir / "gt.json").string() + " --iou 0.5 0.75 --out " +
                         (dir / "out").string());
  REQUIRE(r.exit_code == 0);
  const json report = json::parse(std::ifstream(dir / "out" / "metrics.json"));
  REQUIRE(report.at("results").size() == 2);
  CHECK(report.at("results")[0].at("ap").get<double>() == 1.0);
  CHECK(report.at("results")[1].at("ap").get<double>() == 1.0);
  CHECK(std::filesystem::exists(dir / "out" / "metrics.csv"));

  // Malformed detections: schema mismatch is exit 2.
  std::ofstream(dir / "bad.jsonl") << "{\"image_id\": \"x\", \"bbox\": \"oops\"}\n";
  const auto bad = run_cli("eval --task det --dets " + (dir / "bad.jsonl").string() +
                           " --gt " + (dir / "gt.json").string() + " --out " +
                           (dir / "out2").string());
  CHECK(bad.exit_code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("eval seg reproduces the quadrant fixture mean") {
  const auto dir = testutil::scratch_dir("cli_seg");
  std::filesystem::create_directories(dir / "gt");
  std::filesystem::create_directories(dir / "pred");

  Frame pred = Frame::constant(2, 2, 1, 0.0);
  pred.at(1, 0) = 1.0 / 255.0;
  pred.at(1, 1) = 1.0 / 255.0;
  Frame gt = Frame::constant(2, 2, 1, 0.0);
  gt.at(0, 1) = 1.0 / 255.0;
  gt.at(1, 0) = 1.0 / 255.0;
  gt.at(1, 1) = 1.0 / 255.0;
  write_raster(dir / "pred" / "s.png", pred, 8);
  write_raster(dir / "gt" / "s.png", gt, 8);

  const auto r = run_cli("eval --task seg --preds " + (dir / "pred").string() +
                         " --gt " + (dir / "gt").string() +
                         " --classes A B --out " + (dir / "out").string());
  REQUIRE(r.exit_code == 0);
  const json report = json::parse(std::ifstream(dir / "out" / "metrics.json"));
  CHECK(std::abs(report.at("mean_iou").get<double>() - 7.0 / 12.0) < 1e-9);
  CHECK(std::abs(report.at("per_class").at("A").get<double>() - 0.5) < 1e-9);
  std::filesystem::remove_all(dir);
}

TEST_CASE("filter separates the deviating track and honors exit codes") {
  const auto dir = testutil::scratch_dir("cli_filter");
  {
    std::ofstream f(dir / "seq.jsonl");
    for (int frame = 0; frame < 3; ++frame) {
      auto line = [&](double cx, double cy) {
        f << json{{"image_id", "f" + std::to_string(frame)},
                  {"frame_index", frame},
                  {"class_id", 0},
                  {"bbox", {cx - 2, cy - 2, cx + 2, cy + 2}},
                  {"score", 0.8}}
                 .dump()
          << "\n";
      };
      line(10.0 + 5.0 * frame, 10.0);   // background
      line(10.0 + 5.0 * frame, 60.0);   // background
      line(10.0 + 1.0 * frame, 110.0);  // target (residual 4 px/frame)
    }
  }
  const auto r = run_cli("filter --dets " + (dir / "seq.jsonl").string() +
                         " --flow 5 0 --gate 8 --thresh 1 --out " + (dir / "out").string());
  REQUIRE(r.exit_code == 0);
  const json tracks = json::parse(std::ifstream(dir / "out" / "tracks.json"));
  CHECK(tracks.at("summary").at("target").get<int>() == 1);
  CHECK(tracks.at("summary").at("background").get<int>() == 2);
  CHECK(tracks.at("summary").at("unknown").get<int>() == 0);

  // Median mode with two tracks: precondition failure is exit 2.
  {
    std::ofstream f(dir / "two.jsonl");
    for (int frame = 0; frame < 3; ++frame) {
      for (int t = 0; t < 2; ++t) {
        f << json{{"frame_index", frame},
                  {"class_id", 0},
                  {"bbox", {100.0 * t + 5.0 * frame, 10, 100.0 * t + 5.0 * frame + 4, 14}},
                  {"score", 0.8}}
                 .dump()
          << "\n";
      }
    }
  }
  const auto med = run_cli("filter --dets " + (dir / "two.jsonl").string() +
                           " --flow-mode median --out " + (dir / "out2").string());
  CHECK(med.exit_code == 2);
  CHECK(med.output.find("3 tracks") != std::string::npos);

  // Empty detections: zero tracks, exit 0.
  std::ofstream(dir / "empty.jsonl").close();
  const auto empty = run_cli("filter --dets " + (dir / "empty.jsonl").string() +
                             " --flow 5 0 --out " + (dir / "out3").string());
  CHECK(empty.exit_code == 0);
  const json none = json::parse(std::ifstream(dir / "out3" / "tracks.json"));
  CHECK(none.at("tracks").empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("split and subsample command flow") {
  const auto dir = testutil::scratch_dir("cli_split");
  DatasetManifest m;
  m.class_names = {"spacecraft"};
  for (int i = 0; i < 301; ++i) {
    ManifestEntry e;
    e.image_id = "im" + std::to_string(i);
    e.width = 64;
    e.height = 64;
    m.entries.push_back(e);
  }
  write_coco(m, dir / "coco.json");

  const auto r = run_cli("split --coco " + (dir / "coco.json").string() +
                         " --ratios 0.75 0.20 0.05 --seed 7 --out " + (dir / "s").string());
  REQUIRE(r.exit_code == 0);
  const SplitAssignment s = read_split(dir / "s" / "splits.json");
  CHECK(s.train.size() == 226);
  CHECK(s.val.size() == 60);
  CHECK(s.test.size() == 15);

  const auto r50 = run_cli("subsample --split " + (dir / "s" / "splits.json").string() +
                           " --fraction 0.5 --seed 3 --out " + (dir / "s50").string());
  REQUIRE(r50.exit_code == 0);
  const auto r75 = run_cli("subsample --split " + (dir / "s" / "splits.json").string() +
                           " --fraction 0.75 --seed 3 --out " + (dir / "s75").string());
  REQUIRE(r75.exit_code == 0);
  const SplitAssignment s50 = read_split(dir / "s50" / "splits.json");
  const SplitAssignment s75 = read_split(dir / "s75" / "splits.json");
  CHECK(s50.train.size() == 113);
  const std::set<std::string> in75(s75.train.begin(), s75.train.end());
  for (const auto& id : s50.train) CHECK(in75.count(id) == 1);
  CHECK(s50.val == s.val);
  std::filesystem::remove_all(dir);
}

TEST_CASE("convert writes the frozen yolo line") {
  const auto dir = testutil::scratch_dir("cli_convert");
  DatasetManifest m;
  m.class_names = {"spacecraft"};
  ManifestEntry e;
  e.image_id = "fixture";
  e.image_path = "images/fixture.png";
  e.width = 641;
  e.height = 512;
  Annotation a;
  a.class_id = 0;
  a.bbox = {10.0, 20.0, 110.0, 220.0};
  e.annotations.push_back(a);
  m.entries.push_back(e);
  write_coco(m, dir / "coco.json");

  const auto r = run_cli("convert --coco " + (dir / "coco.json").string() +
                         " --to yolo --out " + (dir / "out").string());
  REQUIRE(r.exit_code == 0);
  CHECK(testutil::read_file_bytes(dir / "out" / "labels" / "fixture.txt") ==
        "0 0.093604 0.234375 0.156006 0.390625\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("distill-demo emits a decreasing loss trace") {
  const auto dir = testutil::scratch_dir("cli_distill");
  const auto r = run_cli("distill-demo --epochs 50 --eta 1e-3 --out " + (dir / "out").string());
  REQUIRE(r.exit_code == 0);
  const json summary = json::parse(std::ifstream(dir / "out" / "summary.json"));
  CHECK(summary.at("final_loss").get<double>() < summary.at("initial_loss").get<double>());

  std::ifstream csv(dir / "out" / "loss_trace.csv");
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  CHECK(line == "epoch,mean_loss");
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 50);
  std::filesystem::remove_all(dir);
}

TEST_CASE("eval runs are byte-reproducible") {
  const auto dir = testutil::scratch_dir("cli_eval_repro");
  const DatasetManifest gt = simple_gt_manifest();
  write_coco(gt, dir / "gt.json");
  {
    std::ofstream dets(dir / "dets.jsonl");
    dets << json{{"image_id", "im0"}, {"class_id", 0},
                 {"bbox", {12.0, 22.0, 58.0, 76.0}}, {"score", 0.7}}
                .dump()
         << "\n";
  }
  const std::string base = "eval --task det --dets " + (dir / "dets.jsonl").string() +
                           " --gt " + (dir / "gt.json").string() + " --out ";
  REQUIRE(run_cli(base + (dir / "r1").string()).exit_code == 0);
  REQUIRE(run_cli(base + (dir / "r2").string()).exit_code == 0);
  CHECK(testutil::read_file_bytes(dir / "r1" / "metrics.json") ==
        testutil::read_file_bytes(dir / "r2" / "metrics.json"));
  CHECK(testutil::read_file_bytes(dir / "r1" / "metrics.csv") ==
        testutil::read_file_bytes(dir / "r2" / "metrics.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("distill-demo exits 4 when the loss diverges") {
  const auto dir = testutil::scratch_dir("cli_distill_div");
  const auto r = run_cli(
      "distill-demo --epochs 400 --eta 1e9 --reduction sum_sq --out " +
      (dir / "out").string());
  CHECK(r.exit_code == 4);
  CHECK(r.output.find("eta") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bench reports the requested pass count and rejects bad targets") {
  const auto dir = testutil::scratch_dir("cli_bench");
  const auto r = run_cli("bench --target noop --passes 20 --warmup 2 --out " +
                         (dir / "out").string());
  REQUIRE(r.exit_code == 0);
  const json report = json::parse(std::ifstream(dir / "out" / "bench_report.json"));
  CHECK(report.at("n_passes").get<int>() == 20);
  CHECK(report.at("warmup_passes").get<int>() == 2);

  const auto bad = run_cli("bench --target bogus --out " + (dir / "out2").string());
  CHECK(bad.exit_code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("usage errors exit 2") {
  const auto r = run_cli("synth");
  CHECK(r.exit_code == 2);
  const auto unknown = run_cli("frobnicate");
  CHECK(unknown.exit_code == 2);
}
