#pragma once

#include "cloudseg/pipeline_config.hpp"

namespace cloudseg::cli {

// Each command returns its process exit code: 0 when every scene succeeded,
// 2 when at least one scene failed. Whole-command failures (missing model,
// empty dataset, ...) propagate as exceptions for main() to map.
int cmd_correct_gt(const config::PipelineConfig& cfg);
int cmd_prepare(const config::PipelineConfig& cfg);
int cmd_train(const config::PipelineConfig& cfg);
int cmd_predict(const config::PipelineConfig& cfg);
int cmd_evaluate(const config::PipelineConfig& cfg);

}  // namespace cloudseg::cli
