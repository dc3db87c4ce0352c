#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cloudseg/checkpoint.hpp"
#include "cloudseg/dataset.hpp"
#include "cloudseg/gradient.hpp"
#include "cloudseg/metrics.hpp"
#include "cloudseg/predict.hpp"
#include "cloudseg/qa.hpp"
#include "cloudseg/scene.hpp"
#include "cloudseg/trainer.hpp"

namespace cloudseg::cli {

namespace fs = std::filesystem;

namespace {

std::vector<fs::path> scene_dirs(const fs::path& root) {
  if (!fs::is_directory(root))
    throw IoError("scene root '" + root.string() + "' is not a directory");
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty())
    throw InputError("scene root '" + root.string() + "' has no scene directories");
  return dirs;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string num(const std::optional<double>& v) {
  return v ? num(*v) : "undefined";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file << text;
  if (!file) throw IoError("write failed for " + path.string());
}

io::MaskGrid default_gt(const fs::path& dir, const io::QaBitConfig& qa_cfg) {
  return io::decode_qa(io::load_scene_qa(dir), qa_cfg).cloud;
}

struct SceneLoop {
  int failures = 0;

  template <class Fn>
  void run(const std::string& id, Fn&& fn) {
    try {
      fn();
      std::cout << id << ": ok" << std::endl;
    } catch (const Error& e) {
      ++failures;
      std::cerr << id << ": error: " << e.what() << std::endl;
    }
  }

  int finish(const char* command, std::size_t scenes) const {
    std::cout << command << ": " << scenes << " scenes, " << failures
              << " failed" << std::endl;
    return failures ? 2 : 0;
  }
};

}  // namespace

int cmd_correct_gt(const config::PipelineConfig& cfg) {
  const auto dirs = scene_dirs(cfg.paths.scene_root);
  SceneLoop loop;
  for (const fs::path& dir : dirs) {
    const std::string id = dir.filename().string();
    loop.run(id, [&] {
      const auto band_id = static_cast<io::BandId>(cfg.correction.band);
      const io::Raster band = io::read_raster(dir / io::band_file_name(band_id));
      const io::QaMasks regions = io::decode_qa(io::load_scene_qa(dir), cfg.qa);

      const correction::GradientField field = correction::gradient_magnitude(band);
      const correction::ChosenThreshold threshold =
          correction::choose_threshold(field, &regions.cloud, cfg.correction.threshold);
      const io::MaskGrid snow = correction::snow_mask(field, threshold.value);
      const io::MaskGrid corrected = correction::correct_ground_truth(regions.cloud, snow);
      const correction::RegionGradientStats stats =
          correction::region_stats(field, regions.cloud, regions.snow, regions.clear);

      const fs::path out = cfg.paths.correction_dir / id;
      fs::create_directories(out);
      io::write_mask(snow, out / "snow.pgm");
      io::write_mask(corrected, out / "corrected_gt.pgm");
      io::write_mask(regions.cloud, out / "default_gt.pgm");

      std::string report;
      report += "scene_id " + id + "\n";
      report += "band " + std::to_string(cfg.correction.band) + "\n";
      report += "threshold " + num(threshold.value) + "\n";
      report += std::string("threshold_source ") +
                (threshold.from_percentile ? "percentile" : "fixed") + "\n";
      report += "cloud_pixels " + std::to_string(stats.cloud_pixels) + "\n";
      report += "snow_pixels " + std::to_string(stats.snow_pixels) + "\n";
      report += "clear_pixels " + std::to_string(stats.clear_pixels) + "\n";
      report += "mean_cloud " + num(stats.mean_cloud) + "\n";
      report += "mean_snow " + num(stats.mean_snow) + "\n";
      report += "mean_clear " + num(stats.mean_clear) + "\n";
      report += "detected_snow_pixels " + std::to_string(snow.count_set()) + "\n";
      report += "default_gt_pixels " + std::to_string(regions.cloud.count_set()) + "\n";
      report += "corrected_gt_pixels " + std::to_string(corrected.count_set()) + "\n";
      write_text(out / "stats.txt", report);
    });
  }
  return loop.finish("correct-gt", dirs.size());
}

int cmd_prepare(const config::PipelineConfig& cfg) {
  const auto dirs = scene_dirs(cfg.paths.scene_root);
  fs::create_directories(cfg.paths.patch_dir);

  std::vector<data::PatchRecord> records;
  SceneLoop loop;
  for (const fs::path& dir : dirs) {
    const std::string id = dir.filename().string();
    loop.run(id, [&] {
      const io::SceneBands scene = io::load_scene_bands(dir);
      io::MaskGrid gt;
      if (cfg.prepare.gt == config::PrepareSettings::GtSource::corrected)
        gt = io::read_mask(cfg.paths.correction_dir / id / "corrected_gt.pgm");
      else
        gt = default_gt(dir, cfg.qa);
      data::prepare_scene(scene, gt, cfg.patches.native_size,
                          cfg.network.input_size, cfg.paths.patch_dir, records);
    });
  }
  data::write_manifest(records, cfg.paths.patch_dir / data::manifest_file_name());
  std::cout << "manifest: " << records.size() << " patches" << std::endl;
  return loop.finish("prepare", dirs.size());
}

int cmd_train(const config::PipelineConfig& cfg) {
  const auto dataset = data::load_patch_dataset<float>(cfg.paths.patch_dir);
  std::cout << "dataset: " << dataset.size() << " patches" << std::endl;

  train::TrainConfig tc = cfg.train;
  tc.checkpoint_path = cfg.paths.model_path.string();
  if (!cfg.paths.model_path.parent_path().empty())
    fs::create_directories(cfg.paths.model_path.parent_path());
  if (!cfg.paths.loss_log.parent_path().empty())
    fs::create_directories(cfg.paths.loss_log.parent_path());

  const train::TrainResult<float> result =
      train::train<float>(dataset, tc, cfg.network, [](const train::EpochLog& entry) {
        std::cout << train::loss_log_line(entry) << std::endl;
      });

  write_text(cfg.paths.loss_log, train::loss_log_text(result.log));
  std::cout << "train: " << result.log.size() << " epochs, model at "
            << cfg.paths.model_path.string() << std::endl;
  return 0;
}

int cmd_predict(const config::PipelineConfig& cfg) {
  const unet::ModelParams<float> params =
      unet::load_params<float>(cfg.paths.model_path, cfg.network);
  pipeline::PredictOptions opt;
  opt.patch_size = cfg.patches.native_size;
  opt.threshold = cfg.predict.threshold;

  const auto dirs = scene_dirs(cfg.paths.scene_root);
  fs::create_directories(cfg.paths.pred_dir);
  SceneLoop loop;
  for (const fs::path& dir : dirs) {
    const std::string id = dir.filename().string();
    loop.run(id, [&] {
      const io::SceneBands scene = io::load_scene_bands(dir);
      const pipeline::ScenePrediction<float> pred =
          pipeline::predict_scene(params, scene, opt);
      io::write_mask(pred.mask, cfg.paths.pred_dir / (id + ".pgm"));

      io::Raster prob;
      prob.width = pred.probability.width;
      prob.height = pred.probability.height;
      prob.scene_id = id;
      prob.samples.resize(pred.probability.values.size());
      for (std::size_t i = 0; i < prob.samples.size(); ++i)
        prob.samples[i] = static_cast<std::uint16_t>(
            std::lround(pred.probability.values[i] * 65535.0));
      io::write_raster(prob, cfg.paths.pred_dir / (id + "_prob.csr1"));
    });
  }
  return loop.finish("predict", dirs.size());
}

int cmd_evaluate(const config::PipelineConfig& cfg) {
  if (!fs::is_directory(cfg.paths.pred_dir))
    throw IoError("prediction dir '" + cfg.paths.pred_dir.string() +
                  "' is not a directory");
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(cfg.paths.pred_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      ids.push_back(entry.path().stem().string());
  std::sort(ids.begin(), ids.end());
  if (ids.empty())
    throw InputError("prediction dir '" + cfg.paths.pred_dir.string() +
                     "' has no .pgm masks");

  auto cell = [](const std::optional<double>& m) -> std::string {
    if (!m) return "undefined";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", *m);
    return buf;
  };
  auto metric_cells = [&](const metrics::MetricReport& report) {
    return cell(report.jaccard) + "," + cell(report.precision) + "," +
           cell(report.recall) + "," + cell(report.overall_accuracy);
  };
  auto count_cells = [](const metrics::ConfusionCounts& c) {
    return std::to_string(c.tp) + "," + std::to_string(c.tn) + "," +
           std::to_string(c.fp) + "," + std::to_string(c.fn);
  };

  std::string report = "scene_id,tp,tn,fp,fn,jaccard,precision,recall,accuracy\n";
  std::vector<metrics::ConfusionCounts> scored;
  int failures = 0;
  for (const std::string& id : ids) {
    try {
      const io::MaskGrid pred = io::read_mask(cfg.paths.pred_dir / (id + ".pgm"));
      const io::MaskGrid truth = io::read_mask(cfg.paths.truth_dir / (id + ".pgm"));
      const metrics::ConfusionCounts counts = metrics::confusion(pred, truth);
      scored.push_back(counts);
      report += id + "," + count_cells(counts) + "," +
                metric_cells(metrics::compute_metrics(counts)) + "\n";
    } catch (const Error& e) {
      ++failures;
      report += id + ",error," + e.what() + "\n";
      std::cerr << id << ": error: " << e.what() << std::endl;
    }
  }
  if (!scored.empty()) {
    report += "aggregate_pooled," + count_cells(metrics::sum_counts(scored)) + "," +
              metric_cells(metrics::aggregate(scored, metrics::AggregateMode::pooled)) +
              "\n";
    report += "aggregate_mean,,,,," +
              metric_cells(metrics::aggregate(scored, metrics::AggregateMode::mean)) +
              "\n";
  }

  if (!cfg.paths.report_path.parent_path().empty())
    fs::create_directories(cfg.paths.report_path.parent_path());
  write_text(cfg.paths.report_path, report);
  std::cout << report;
  std::cout << "evaluate: " << ids.size() << " scenes, " << failures << " failed"
            << std::endl;
  return failures ? 2 : 0;
}

}  // namespace cloudseg::cli
