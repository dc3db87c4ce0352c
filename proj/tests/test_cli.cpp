#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cloudseg/checkpoint.hpp"
#include "cloudseg/dataset.hpp"
#include "cloudseg/gradient.hpp"
#include "cloudseg/metrics.hpp"
#include "cloudseg/qa.hpp"
#include "synthetic.hpp"

using namespace cloudseg;
namespace fs = std::filesystem;

namespace {

const fs::path kWorkRoot = "/tmp/cloudseg_cli_tests";

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(CLOUDSEG_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

void spit(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  std::ostringstream buf;
  buf << file.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(cell);
  return cells;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// Loss log lines minus the wall-clock column, which varies run to run.
std::string strip_wall(const std::string& log_text) {
  std::string out;
  for (const std::string& line : lines_of(log_text)) {
    const std::size_t last = line.rfind(',');
    out += line.substr(0, last);
    out += '\n';
  }
  return out;
}

std::string pipeline_config_text() {
  return "seed = 5\n"
         "\n"
         "[paths]\n"
         "scene_root = scenes\n"
         "correction_dir = correction\n"
         "patch_dir = patches\n"
         "model_path = model.csck\n"
         "loss_log = loss.csv\n"
         "pred_dir = predictions\n"
         "truth_dir = truth\n"
         "report_path = metrics.csv\n"
         "\n"
         "[network]\n"
         "input_size = 16\n"
         "base_channels = 2\n"
         "channel_cap = 4\n"
         "encode_blocks = 2\n"
         "\n"
         "[train]\n"
         "epochs = 2\n"
         "batch_size = 4\n"
         "learning_rate = 0.003\n"
         "\n"
         "[patches]\n"
         "native_size = 48\n";
}

// One shared end-to-end run: two 96x96 scenes through every subcommand in
// pipeline order. Assertions live in the test cases; the constructor only
// records exit codes.
struct Pipeline {
  fs::path root = kWorkRoot / "pipeline";
  synthetic::SyntheticScene scene_a;
  synthetic::SyntheticScene scene_b;
  int correct_exit = -1;
  int prepare_exit = -1;
  int train_exit = -1;
  int predict_exit = -1;
  int evaluate_exit = -1;

  Pipeline() {
    fs::remove_all(root);
    fs::create_directories(root);

    synthetic::SceneSpec spec;
    spec.width = 96;
    spec.height = 96;
    spec.seed = 1;
    scene_a = synthetic::make_snow_cloud_scene(spec);
    spec.seed = 2;
    scene_b = synthetic::make_snow_cloud_scene(spec);
    synthetic::write_scene_dir(scene_a, root / "scenes" / "sceneA");
    synthetic::write_scene_dir(scene_b, root / "scenes" / "sceneB");
    fs::create_directories(root / "truth");
    io::write_mask(scene_a.cloud, root / "truth" / "sceneA.pgm");
    io::write_mask(scene_b.cloud, root / "truth" / "sceneB.pgm");
    spit(root / "pipeline.cfg", pipeline_config_text());

    const std::string cfg = " --config " + (root / "pipeline.cfg").string();
    correct_exit = run_cli("correct-gt" + cfg, root / "correct.log");
    prepare_exit = run_cli("prepare" + cfg, root / "prepare.log");
    train_exit = run_cli("train" + cfg, root / "train.log");
    predict_exit = run_cli("predict" + cfg, root / "predict.log");
    evaluate_exit = run_cli("evaluate" + cfg, root / "evaluate.log");
  }
};

const Pipeline& fixture() {
  static Pipeline p;
  return p;
}

unet::NetworkConfig pipeline_net() {
  unet::NetworkConfig cfg;
  cfg.input_size = 16;
  cfg.base_channels = 2;
  cfg.channel_cap = 4;
  cfg.encode_blocks = 2;
  cfg.decode_blocks = 1;
  return cfg;
}

}  // namespace

TEST_CASE("correct-gt writes masks and a stats report per scene") {
  const Pipeline& p = fixture();
  REQUIRE(p.correct_exit == 0);

  for (const char* id : {"sceneA", "sceneB"}) {
    const fs::path dir = p.root / "correction" / id;
    CHECK(fs::exists(dir / "snow.pgm"));
    CHECK(fs::exists(dir / "corrected_gt.pgm"));
    CHECK(fs::exists(dir / "default_gt.pgm"));
    CHECK(fs::exists(dir / "stats.txt"));
  }

  const fs::path dir = p.root / "correction" / "sceneA";
  const io::MaskGrid snow = io::read_mask(dir / "snow.pgm");
  const io::MaskGrid fallback = io::read_mask(dir / "default_gt.pgm");
  const io::MaskGrid corrected = io::read_mask(dir / "corrected_gt.pgm");
  REQUIRE(fallback.pixel_count() == corrected.pixel_count());
  CHECK(fallback.count_set() > 0);
  for (std::size_t i = 0; i < corrected.bits.size(); ++i)
    CHECK(corrected.bits[i] == (fallback.bits[i] && !snow.bits[i] ? 1 : 0));

  SUBCASE("the default ground truth is the decoded quality cloud mask") {
    const io::QaMasks regions = io::decode_qa(p.scene_a.qa, io::QaBitConfig{});
    CHECK(fallback == regions.cloud);
  }

  SUBCASE("the stats report matches an in-process rerun") {
    const io::QaMasks regions = io::decode_qa(p.scene_a.qa, io::QaBitConfig{});
    const correction::GradientField field =
        correction::gradient_magnitude(p.scene_a.bands.blue);
    const correction::ChosenThreshold threshold =
        correction::choose_threshold(field, &regions.cloud, correction::ThresholdSettings{});
    const correction::RegionGradientStats stats =
        correction::region_stats(field, regions.cloud, regions.snow, regions.clear);
    const io::MaskGrid snow_again = correction::snow_mask(field, threshold.value);

    std::string expected;
    expected += "scene_id sceneA\n";
    expected += "band 2\n";
    expected += "threshold " + num(threshold.value) + "\n";
    expected += "threshold_source percentile\n";
    expected += "cloud_pixels " + std::to_string(stats.cloud_pixels) + "\n";
    expected += "snow_pixels " + std::to_string(stats.snow_pixels) + "\n";
    expected += "clear_pixels " + std::to_string(stats.clear_pixels) + "\n";
    expected += "mean_cloud " + num(*stats.mean_cloud) + "\n";
    expected += "mean_snow undefined\n";
    expected += "mean_clear " + num(*stats.mean_clear) + "\n";
    expected += "detected_snow_pixels " + std::to_string(snow_again.count_set()) + "\n";
    expected += "default_gt_pixels " + std::to_string(regions.cloud.count_set()) + "\n";
    expected +=
        "corrected_gt_pixels " +
        std::to_string(correction::correct_ground_truth(regions.cloud, snow_again).count_set()) +
        "\n";
    CHECK(slurp(dir / "stats.txt") == expected);
  }
}

TEST_CASE("prepare tiles every scene into network-sized patches") {
  const Pipeline& p = fixture();
  REQUIRE(p.prepare_exit == 0);

  const auto records =
      data::read_manifest(p.root / "patches" / data::manifest_file_name());
  CHECK(records.size() == 8);  // two 96x96 scenes at native 48: 2x2 each

  const auto dataset = data::load_patch_dataset<float>(p.root / "patches");
  REQUIRE(dataset.size() == 8);
  for (const auto& sample : dataset) {
    CHECK(sample.image.channels == 4);
    CHECK(sample.image.height == 16);
    CHECK(sample.image.width == 16);
    CHECK(sample.mask.channels == 1);
  }
}

TEST_CASE("train writes a loss log and a resumable model") {
  const Pipeline& p = fixture();
  REQUIRE(p.train_exit == 0);

  const std::string log = slurp(p.root / "loss.csv");
  const auto rows = lines_of(log);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].substr(0, 2) == "1,");
  CHECK(rows[1].substr(0, 2) == "2,");

  const std::string console = slurp(p.root / "train.log");
  CHECK(console.find("dataset: 8 patches") != std::string::npos);
  CHECK(console.find(rows[0]) != std::string::npos);  // per-epoch progress echoed

  const auto ck = unet::load_checkpoint<float>(p.root / "model.csck");
  CHECK(ck.seed == 5);
  CHECK(ck.config == pipeline_net());
  REQUIRE(ck.find_meta("epoch") != nullptr);
  CHECK(*ck.find_meta("epoch") == "2");
}

TEST_CASE("predict writes scene-sized masks and probability maps") {
  const Pipeline& p = fixture();
  REQUIRE(p.predict_exit == 0);

  for (const char* id : {"sceneA", "sceneB"}) {
    const io::MaskGrid mask =
        io::read_mask(p.root / "predictions" / (std::string(id) + ".pgm"));
    CHECK(mask.width == 96);
    CHECK(mask.height == 96);

    const io::Raster prob =
        io::read_raster(p.root / "predictions" / (std::string(id) + "_prob.csr1"));
    CHECK(prob.width == 96);
    CHECK(prob.height == 96);
    CHECK(prob.band == io::BandId::unspecified);
  }
}

TEST_CASE("evaluate reports per-scene rows plus both aggregate footers") {
  const Pipeline& p = fixture();
  REQUIRE(p.evaluate_exit == 0);

  const std::string report = slurp(p.root / "metrics.csv");
  const auto rows = lines_of(report);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "scene_id,tp,tn,fp,fn,jaccard,precision,recall,accuracy");
  CHECK(rows[1].substr(0, 7) == "sceneA,");
  CHECK(rows[2].substr(0, 7) == "sceneB,");
  CHECK(rows[3].substr(0, 17) == "aggregate_pooled,");
  CHECK(rows[4].substr(0, 15) == "aggregate_mean,");

  SUBCASE("counts match an in-process confusion tally") {
    const io::MaskGrid pred = io::read_mask(p.root / "predictions" / "sceneA.pgm");
    const io::MaskGrid truth = io::read_mask(p.root / "truth" / "sceneA.pgm");
    const metrics::ConfusionCounts counts = metrics::confusion(pred, truth);
    const auto cells = split(rows[1], ',');
    REQUIRE(cells.size() == 9);
    CHECK(cells[1] == std::to_string(counts.tp));
    CHECK(cells[2] == std::to_string(counts.tn));
    CHECK(cells[3] == std::to_string(counts.fp));
    CHECK(cells[4] == std::to_string(counts.fn));
  }
  SUBCASE("the report is echoed to stdout") {
    const std::string console = slurp(p.root / "evaluate.log");
    CHECK(console.find(rows[0]) != std::string::npos);
    CHECK(console.find(rows[3]) != std::string::npos);
  }
}

TEST_CASE("an invalid config fails before any output is written") {
  const fs::path root = kWorkRoot / "invalid_config";
  fs::remove_all(root);
  fs::create_directories(root / "scenes" / "sceneA");

  std::string text = pipeline_config_text();
  const std::size_t pos = text.find("epochs = 2");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 10, "epochs = 0");
  spit(root / "pipeline.cfg", text);

  const int code = run_cli("train --config " + (root / "pipeline.cfg").string(),
                           root / "train.log");
  CHECK(code == 1);
  CHECK(!fs::exists(root / "model.csck"));
  CHECK(!fs::exists(root / "loss.csv"));

  SUBCASE("unknown keys are rejected the same way") {
    spit(root / "typo.cfg", pipeline_config_text() + "native_siz = 48\n");
    CHECK(run_cli("prepare --config " + (root / "typo.cfg").string(),
                  root / "prepare.log") == 1);
    CHECK(!fs::exists(root / "patches"));
  }
}

TEST_CASE("a broken scene is reported without stopping the batch") {
  const fs::path root = kWorkRoot / "broken_scene";
  fs::remove_all(root);

  synthetic::SceneSpec spec;
  spec.width = 96;
  spec.height = 96;
  spec.seed = 3;
  const auto good = synthetic::make_snow_cloud_scene(spec);
  spec.seed = 4;
  const auto bad = synthetic::make_snow_cloud_scene(spec);
  synthetic::write_scene_dir(good, root / "scenes" / "good");
  synthetic::write_scene_dir(bad, root / "scenes" / "broken");
  fs::remove(root / "scenes" / "broken" / io::qa_file_name());
  spit(root / "pipeline.cfg", pipeline_config_text());

  const std::string cfg = " --config " + (root / "pipeline.cfg").string();
  const int code = run_cli("correct-gt" + cfg, root / "correct.log");
  CHECK(code == 2);
  CHECK(fs::exists(root / "correction" / "good" / "corrected_gt.pgm"));
  CHECK(!fs::exists(root / "correction" / "broken" / "corrected_gt.pgm"));

  SUBCASE("prediction skips a scene whose band dimensions disagree") {
    io::Raster stub;
    stub.width = 8;
    stub.height = 8;
    stub.band = io::BandId::nir;
    stub.samples.assign(64, 100);
    io::write_raster(stub, root / "scenes" / "broken" / io::band_file_name(io::BandId::nir));

    // give predict a model to load
    unet::save_params(unet::init_params<float>(pipeline_net(), 3), 3,
                      root / "model.csck");
    const int pred_code = run_cli("predict" + cfg, root / "predict.log");
    CHECK(pred_code == 2);
    CHECK(fs::exists(root / "predictions" / "good.pgm"));
    CHECK(!fs::exists(root / "predictions" / "broken.pgm"));
  }
}

TEST_CASE("evaluate isolates bad prediction-truth pairs as error rows") {
  const fs::path root = kWorkRoot / "eval_isolation";
  fs::remove_all(root);
  fs::create_directories(root / "scenes");
  fs::create_directories(root / "predictions");
  fs::create_directories(root / "truth");

  io::MaskGrid big(10, 10);
  for (int x = 0; x < 10; ++x) big.set(4, x, true);
  io::MaskGrid small(5, 5, 1);

  io::write_mask(big, root / "predictions" / "ok.pgm");
  io::write_mask(big, root / "truth" / "ok.pgm");
  io::write_mask(big, root / "predictions" / "orphan.pgm");  // no truth file
  io::write_mask(small, root / "predictions" / "shrunk.pgm");
  io::write_mask(big, root / "truth" / "shrunk.pgm");  // dimension mismatch
  spit(root / "pipeline.cfg", pipeline_config_text());

  const int code = run_cli("evaluate --config " + (root / "pipeline.cfg").string(),
                           root / "evaluate.log");
  CHECK(code == 2);

  const auto rows = lines_of(slurp(root / "metrics.csv"));
  REQUIRE(rows.size() == 6);  // header, 3 scenes, 2 aggregate rows
  CHECK(rows[1] == "ok,10,90,0,0,1.000000,1.000000,1.000000,1.000000");
  CHECK(rows[2].substr(0, 13) == "orphan,error,");
  CHECK(rows[3].substr(0, 13) == "shrunk,error,");
  CHECK(rows[4].substr(0, 17) == "aggregate_pooled,");
  CHECK(rows[5].substr(0, 15) == "aggregate_mean,");
}

TEST_CASE("training runs are deterministic for a fixed seed") {
  const Pipeline& p = fixture();
  REQUIRE(p.train_exit == 0);

  auto variant_config = [&](const std::string& tag) {
    std::string text = pipeline_config_text();
    const auto replace = [&](const std::string& from, const std::string& to) {
      const std::size_t pos = text.find(from);
      REQUIRE(pos != std::string::npos);
      text.replace(pos, from.size(), to);
    };
    replace("model_path = model.csck", "model_path = model_" + tag + ".csck");
    replace("loss_log = loss.csv", "loss_log = loss_" + tag + ".csv");
    const fs::path path = p.root / ("train_" + tag + ".cfg");
    spit(path, text);
    return path;
  };

  const fs::path cfg_a = variant_config("a");
  const fs::path cfg_b = variant_config("b");
  REQUIRE(run_cli("train --config " + cfg_a.string(), p.root / "train_a.log") == 0);
  REQUIRE(run_cli("train --config " + cfg_b.string(), p.root / "train_b.log") == 0);

  const std::string bytes_a = slurp(p.root / "model_a.csck");
  CHECK(bytes_a == slurp(p.root / "model_b.csck"));
  CHECK(bytes_a == slurp(p.root / "model.csck"));
  CHECK(strip_wall(slurp(p.root / "loss_a.csv")) ==
        strip_wall(slurp(p.root / "loss_b.csv")));

  SUBCASE("a seed flag overrides the config and changes the result") {
    const fs::path cfg_c = variant_config("c");
    REQUIRE(run_cli("train --seed 99 --config " + cfg_c.string(),
                    p.root / "train_c.log") == 0);
    const auto ck = unet::load_checkpoint<float>(p.root / "model_c.csck");
    CHECK(ck.seed == 99);
    CHECK(slurp(p.root / "model_c.csck") != bytes_a);
  }
}

TEST_CASE("resuming continues the epoch sequence of a straight run") {
  const Pipeline& p = fixture();
  REQUIRE(p.train_exit == 0);

  auto four_epoch_config = [&](const std::string& tag) {
    std::string text = pipeline_config_text();
    const auto replace = [&](const std::string& from, const std::string& to) {
      const std::size_t pos = text.find(from);
      REQUIRE(pos != std::string::npos);
      text.replace(pos, from.size(), to);
    };
    replace("epochs = 2", "epochs = 4");
    replace("model_path = model.csck", "model_path = model_" + tag + ".csck");
    replace("loss_log = loss.csv", "loss_log = loss_" + tag + ".csv");
    const fs::path path = p.root / ("train_" + tag + ".cfg");
    spit(path, text);
    return path;
  };

  const fs::path straight = four_epoch_config("straight");
  const fs::path resumed = four_epoch_config("resumed");
  REQUIRE(run_cli("train --config " + straight.string(),
                  p.root / "train_straight.log") == 0);
  REQUIRE(run_cli("train --config " + resumed.string() + " --resume " +
                      (p.root / "model.csck").string(),
                  p.root / "train_resumed.log") == 0);

  const auto rows = lines_of(slurp(p.root / "loss_resumed.csv"));
  REQUIRE(rows.size() == 2);  // epochs 3 and 4 only
  CHECK(rows[0].substr(0, 2) == "3,");
  CHECK(rows[1].substr(0, 2) == "4,");
  CHECK(slurp(p.root / "model_resumed.csck") == slurp(p.root / "model_straight.csck"));

  const auto straight_rows = lines_of(slurp(p.root / "loss_straight.csv"));
  REQUIRE(straight_rows.size() == 4);
  CHECK(strip_wall(rows[0]) == strip_wall(straight_rows[2]));
  CHECK(strip_wall(rows[1]) == strip_wall(straight_rows[3]));
}

TEST_CASE("a threshold flag switches correction to fixed mode") {
  const Pipeline& p = fixture();
  REQUIRE(p.correct_exit == 0);

  const fs::path root = kWorkRoot / "fixed_threshold";
  fs::remove_all(root);
  synthetic::SceneSpec spec;
  spec.width = 96;
  spec.height = 96;
  spec.seed = 1;
  const auto scene = synthetic::make_snow_cloud_scene(spec);
  synthetic::write_scene_dir(scene, root / "scenes" / "sceneA");
  spit(root / "pipeline.cfg", pipeline_config_text());

  const int code = run_cli("correct-gt --threshold 0.9 --config " +
                               (root / "pipeline.cfg").string(),
                           root / "correct.log");
  REQUIRE(code == 0);

  const std::string stats = slurp(root / "correction" / "sceneA" / "stats.txt");
  CHECK(stats.find("threshold 0.9\n") != std::string::npos);
  CHECK(stats.find("threshold_source fixed\n") != std::string::npos);

  const io::MaskGrid snow = io::read_mask(root / "correction" / "sceneA" / "snow.pgm");
  const io::MaskGrid expected = correction::snow_mask(
      correction::gradient_magnitude(scene.bands.blue), 0.9);
  CHECK(snow == expected);
}

TEST_CASE("prepare honors the configured ground-truth source") {
  const Pipeline& p = fixture();
  REQUIRE(p.prepare_exit == 0);

  std::string text = pipeline_config_text();
  const std::size_t pos = text.find("patch_dir = patches");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 19, "patch_dir = patches_default");
  text += "\n[prepare]\ngt_source = default\n";
  spit(p.root / "prepare_default.cfg", text);

  REQUIRE(run_cli("prepare --config " + (p.root / "prepare_default.cfg").string(),
                  p.root / "prepare_default.log") == 0);

  auto positives = [](const std::vector<train::Sample<float>>& samples) {
    double sum = 0.0;
    for (const auto& s : samples)
      for (float v : s.mask.values) sum += v;
    return sum;
  };
  const double corrected = positives(data::load_patch_dataset<float>(p.root / "patches"));
  const double defaulted =
      positives(data::load_patch_dataset<float>(p.root / "patches_default"));
  CHECK(corrected < defaulted);  // the noisy mislabeled region was removed
}
