#include <cstdio>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "cloudseg/metrics.hpp"
#include "cloudseg/trainer.hpp"
#include "cloudseg/unet.hpp"
#include "synthetic.hpp"

namespace acceptance {

namespace metrics = cloudseg::metrics;
namespace train = cloudseg::train;
namespace unet = cloudseg::unet;

namespace {

constexpr int kPatchCount = 8;
constexpr int kPatchSize = 32;
constexpr int kMaxEpochs = 300;
constexpr double kJaccardFloor = 0.95;
constexpr double kLossCeiling = -0.90;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// Pooled Jaccard of the trained network on its own training patches,
// thresholded at 0.5.
double train_jaccard(const unet::ModelParams<float>& params,
                     const std::vector<train::Sample<float>>& dataset) {
  metrics::ConfusionCounts counts;
  for (const train::Sample<float>& s : dataset) {
    const unet::ForwardResult<float> out = unet::forward(params, s.image);
    for (std::size_t i = 0; i < s.mask.size(); ++i) {
      const bool pred = out.probability.values[i] >= 0.5f;
      const bool truth = s.mask.values[i] != 0.0f;
      if (pred && truth) ++counts.tp;
      else if (pred && !truth) ++counts.fp;
      else if (!pred && truth) ++counts.fn;
      else ++counts.tn;
    }
  }
  const std::uint64_t denom = counts.tp + counts.fp + counts.fn;
  return denom == 0 ? 0.0 : static_cast<double>(counts.tp) / static_cast<double>(denom);
}

}  // namespace

// A small network must be able to memorize eight shape patches within the
// fixed epoch and learning-rate budget: pooled training Jaccard >= 0.95 and
// final epoch-mean loss <= -0.90.
CriterionResult check_overfit() {
  CriterionResult r;

  // shallow on purpose: at lr 1e-4 Adam moves each weight at most ~2400 steps
  // * 1e-4 = 0.24 over the whole budget, which deeper stacks cannot turn into
  // saturated output logits
  unet::NetworkConfig net;
  net.input_size = kPatchSize;
  net.in_channels = 4;
  net.base_channels = 4;
  net.channel_cap = 64;
  net.encode_blocks = 2;
  net.decode_blocks = 1;

  const std::vector<train::Sample<float>> dataset =
      synthetic::make_shape_patches(kPatchCount, kPatchSize, 11);

  train::TrainConfig cfg;
  cfg.epochs = kMaxEpochs;
  cfg.batch_size = 1;
  cfg.seed = 7;
  cfg.adam.learning_rate = 1e-4;
  cfg.augment.hflip = false;
  cfg.augment.rotate90 = false;
  cfg.augment.zoom = false;
  cfg.stop_loss = -0.97;  // early exit once clearly past the gate

  const train::TrainResult<float> result = train::train(dataset, cfg, net);

  const double final_loss = result.log.back().mean_loss;
  const double jaccard = train_jaccard(result.params, dataset);
  r.expect(final_loss <= kLossCeiling,
           "final epoch-mean loss " + fmt(final_loss) + " above " + fmt(kLossCeiling));
  r.expect(jaccard >= kJaccardFloor,
           "training Jaccard " + fmt(jaccard) + " below " + fmt(kJaccardFloor));
  r.summary = "jaccard " + fmt(jaccard) + ", loss " + fmt(final_loss) + " after " +
              std::to_string(result.log.size()) + " epochs";
  return r;
}

}  // namespace acceptance
