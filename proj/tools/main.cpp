#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "cloudseg/pipeline_config.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace cloudseg;

  CLI::App app{"cloud segmentation pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  double threshold = 0.0;
  std::string resume;

  CLI::App* correct = app.add_subcommand(
      "correct-gt", "write snow masks and corrected ground truth per scene");
  CLI::App* prepare =
      app.add_subcommand("prepare", "tile scenes into a training patch dataset");
  CLI::App* train =
      app.add_subcommand("train", "optimize the network on the prepared patches");
  CLI::App* predict = app.add_subcommand(
      "predict", "write probability maps and cloud masks per scene");
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score predicted masks against reference masks");

  for (CLI::App* sub : {correct, prepare, train, predict, evaluate}) {
    sub->add_option("--config", config_path, "pipeline config file")->required();
    sub->add_option("--seed", seed, "override the config seed");
  }
  correct->add_option("--threshold", threshold,
                      "fixed snow gradient threshold (disables percentile mode)");
  predict->add_option("--threshold", threshold, "probability cut for the output mask");
  train->add_option("--resume", resume, "checkpoint to continue training from");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  CLI::App* sub = app.get_subcommands().front();

  config::PipelineConfig cfg;
  try {
    cfg = config::PipelineConfig::load(config_path);
    if (sub->count("--seed")) {
      cfg.seed = seed;
      cfg.train.seed = seed;
    }
    if (sub == correct && sub->count("--threshold")) {
      cfg.correction.threshold.mode = correction::ThresholdSettings::Mode::fixed;
      cfg.correction.threshold.fixed_value = threshold;
    }
    if (sub == predict && sub->count("--threshold")) cfg.predict.threshold = threshold;
    if (sub == train && !resume.empty()) cfg.train.resume_from = resume;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  }

  try {
    if (sub == correct) return cli::cmd_correct_gt(cfg);
    if (sub == prepare) return cli::cmd_prepare(cfg);
    if (sub == train) return cli::cmd_train(cfg);
    if (sub == predict) return cli::cmd_predict(cfg);
    return cli::cmd_evaluate(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
}
