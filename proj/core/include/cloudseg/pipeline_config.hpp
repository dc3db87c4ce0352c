#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "cloudseg/gradient.hpp"
#include "cloudseg/qa.hpp"
#include "cloudseg/trainer.hpp"
#include "cloudseg/unet.hpp"

namespace cloudseg::config {

namespace fs = std::filesystem;

struct Paths {
  fs::path scene_root;                       // directories of input scenes
  fs::path correction_dir = "correction";    // per-scene corrected GT output
  fs::path patch_dir = "patches";            // prepared patch dataset
  fs::path model_path = "model.csck";        // trained checkpoint
  fs::path loss_log = "loss_log.csv";        // one line per epoch
  fs::path pred_dir = "predictions";         // per-scene masks + probability maps
  fs::path truth_dir = "truth";              // reference masks for evaluation
  fs::path report_path = "metrics.csv";      // evaluation report
};

struct CorrectionSettings {
  int band = 2;  // band whose gradients drive snow detection
  correction::ThresholdSettings threshold;
};

struct PrepareSettings {
  enum class GtSource { corrected, defaulted };
  GtSource gt = GtSource::corrected;
};

struct PatchSettings {
  int native_size = 384;  // tiling size at scene resolution
};

struct PredictSettings {
  double threshold = 0.5;
};

// Everything the command-line pipeline needs, parsed from one key-value file
// with [section] headers, '#' comments, and optional quotes around strings.
// Relative paths resolve against the config file's directory. Unknown keys
// are rejected.
struct PipelineConfig {
  std::uint64_t seed = 0;
  Paths paths;
  io::QaBitConfig qa;
  CorrectionSettings correction;
  unet::NetworkConfig network;
  train::TrainConfig train;
  PrepareSettings prepare;
  PatchSettings patches;
  PredictSettings predict;

  static PipelineConfig load(const fs::path& path);

  /// Range and consistency checks; file-existence checks are per command.
  void validate() const;
};

}  // namespace cloudseg::config
