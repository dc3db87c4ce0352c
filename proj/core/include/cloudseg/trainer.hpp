#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cloudseg/adam.hpp"
#include "cloudseg/augment.hpp"
#include "cloudseg/checkpoint.hpp"
#include "cloudseg/loss.hpp"
#include "cloudseg/unet.hpp"

namespace cloudseg::train {

template <class T>
struct Sample {
  Tensor4<T> image;  // (1, in_channels, s, s)
  Tensor4<T> mask;   // (1, 1, s, s), values 0 or 1
};

struct TrainConfig {
  int epochs = 600;
  int batch_size = 4;
  std::uint64_t seed = 0;
  AdamConfig adam;
  double loss_eps = 1e-7;
  AugmentConfig augment;
  unet::InitSpec init;
  bool per_sample_loss = false;        // default: one joint loss per batch
  std::optional<double> stop_loss;     // stop early once mean epoch loss falls this low
  int checkpoint_every = 0;            // epochs between snapshots; 0 = final only
  std::string checkpoint_path;         // empty = never write checkpoints
  std::string resume_from;             // checkpoint to continue from

  void validate() const {
    if (epochs < 1) throw ConfigError("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("TrainConfig: batch_size must be >= 1");
    if (loss_eps <= 0) throw ConfigError("TrainConfig: loss_eps must be positive");
    if (checkpoint_every < 0)
      throw ConfigError("TrainConfig: checkpoint_every must be >= 0");
    adam.validate();
    augment.validate();
  }
};

struct EpochLog {
  int epoch = 0;          // 1-based
  double mean_loss = 0.0; // sample-weighted mean of batch losses
  double wall_seconds = 0.0;
};

/// One loss-log line: "<epoch>,<mean_loss>,<wall_seconds>". The wall column
/// is measured time and is the only part of the log that is not a pure
/// function of config and seed.
inline std::string loss_log_line(const EpochLog& entry) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d,%.9e,%.3f", entry.epoch, entry.mean_loss,
                entry.wall_seconds);
  return buf;
}

inline std::string loss_log_text(const std::vector<EpochLog>& log) {
  std::string out;
  for (const EpochLog& entry : log) {
    out += loss_log_line(entry);
    out += '\n';
  }
  return out;
}

template <class T>
struct TrainResult {
  unet::ModelParams<T> params;
  std::vector<EpochLog> log;
};

namespace traindetail {

// Full optimizer state in one checkpoint so a resumed run replays the exact
// remaining epoch sequence.
template <class T>
unet::Checkpoint<T> snapshot(const unet::ModelParams<T>& params,
                             const AdamState<T>& adam, const Rng& rng,
                             int completed_epochs, std::uint64_t seed) {
  unet::Checkpoint<T> ck = unet::params_to_checkpoint(params, seed);
  ck.meta.emplace_back("epoch", std::to_string(completed_epochs));
  ck.meta.emplace_back("adam_step", std::to_string(adam.step));
  ck.meta.emplace_back("rng_state", rng.save_state());
  std::size_t slot = 0;
  unet::visit_tensors(params, [&](const unet::TensorInfo& info, const std::vector<T>&) {
    ck.tensors.push_back({"adam.m." + info.name, {static_cast<std::uint32_t>(adam.m[slot].size())}, adam.m[slot]});
    ck.tensors.push_back({"adam.v." + info.name, {static_cast<std::uint32_t>(adam.v[slot].size())}, adam.v[slot]});
    ++slot;
  });
  return ck;
}

}  // namespace traindetail

/// Runs the optimization loop. All randomness (initialization, shuffling,
/// augmentation) derives from cfg.seed; two calls with equal inputs produce
/// bit-identical parameters and losses within one build.
template <class T>
TrainResult<T> train(const std::vector<Sample<T>>& dataset, const TrainConfig& cfg,
                     const unet::NetworkConfig& net_cfg,
                     const std::function<void(const EpochLog&)>& progress = {}) {
  cfg.validate();
  net_cfg.validate();
  if (dataset.empty()) throw InputError("train: dataset is empty");
  for (const Sample<T>& s : dataset) {
    if (s.image.height != net_cfg.input_size || s.image.width != net_cfg.input_size ||
        s.image.channels != net_cfg.in_channels || s.image.batch != 1)
      throw ShapeError("train: sample image " + s.image.shape_string() +
                       " does not match network input");
    if (s.mask.channels != 1 || s.mask.height != net_cfg.input_size ||
        s.mask.width != net_cfg.input_size || s.mask.batch != 1)
      throw ShapeError("train: sample mask " + s.mask.shape_string() +
                       " does not match network input");
    // ReLU maps NaN to 0, so a poisoned input would otherwise train silently
    for (const T v : s.image.values)
      if (!std::isfinite(static_cast<double>(v)))
        throw DivergenceError("train: non-finite value in sample image");
  }

  Rng rng(cfg.seed);
  const std::uint64_t init_seed = rng.next_u64();
  unet::ModelParams<T> params;
  AdamState<T> adam;
  int start_epoch = 0;

  if (!cfg.resume_from.empty()) {
    unet::Checkpoint<T> ck = unet::load_checkpoint<T>(cfg.resume_from);
    if (!(ck.config == net_cfg))
      throw ConfigError("train: resume checkpoint was built for a different network config");
    params = unet::checkpoint_to_params(ck);
    adam = AdamState<T>::init(params, cfg.adam);
    const std::string* epoch_text = ck.find_meta("epoch");
    const std::string* step_text = ck.find_meta("adam_step");
    const std::string* rng_text = ck.find_meta("rng_state");
    if (!epoch_text || !step_text || !rng_text)
      throw FormatError("train: checkpoint lacks optimizer state, cannot resume");
    start_epoch = std::stoi(*epoch_text);
    adam.step = std::stoll(*step_text);
    rng.restore_state(*rng_text);
    std::size_t slot = 0;
    unet::visit_tensors(params, [&](const unet::TensorInfo& info, const std::vector<T>&) {
      const auto* m = ck.find("adam.m." + info.name);
      const auto* v = ck.find("adam.v." + info.name);
      if (!m || !v || m->data.size() != adam.m[slot].size())
        throw FormatError("train: checkpoint lacks optimizer tensors for '" + info.name + "'");
      adam.m[slot] = m->data;
      adam.v[slot] = v->data;
      ++slot;
    });
  } else {
    params = unet::init_params<T>(net_cfg, init_seed, cfg.init);
    adam = AdamState<T>::init(params, cfg.adam);
  }

  const std::size_t plane = static_cast<std::size_t>(net_cfg.input_size) * net_cfg.input_size;
  const std::size_t image_stride = plane * net_cfg.in_channels;

  std::vector<std::size_t> order(dataset.size());

  TrainResult<T> result;
  for (int epoch = start_epoch + 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    // each epoch's order is a pure function of the rng state, so a resumed
    // run visits the same batches as the straight run it continues
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t sample_count = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const int nb = static_cast<int>(
          std::min<std::size_t>(cfg.batch_size, order.size() - begin));
      Tensor4<T> images(nb, net_cfg.in_channels, net_cfg.input_size, net_cfg.input_size);
      Tensor4<T> masks(nb, 1, net_cfg.input_size, net_cfg.input_size);
      for (int n = 0; n < nb; ++n) {
        const Sample<T>& s = dataset[order[begin + n]];
        if (cfg.augment.any()) {
          AugmentedPair<T> aug = augment(s.image, s.mask, cfg.augment, rng);
          std::copy(aug.image.values.begin(), aug.image.values.end(),
                    images.values.begin() + n * image_stride);
          std::copy(aug.mask.values.begin(), aug.mask.values.end(),
                    masks.values.begin() + n * plane);
        } else {
          std::copy(s.image.values.begin(), s.image.values.end(),
                    images.values.begin() + n * image_stride);
          std::copy(s.mask.values.begin(), s.mask.values.end(),
                    masks.values.begin() + n * plane);
        }
      }

      unet::ForwardResult<T> fwd = unet::forward(params, images);
      LossValue<T> loss = cfg.per_sample_loss
                              ? jaccard_loss_per_sample(masks, fwd.probability, cfg.loss_eps)
                              : jaccard_loss(masks, fwd.probability, cfg.loss_eps);
      if (!std::isfinite(loss.value))
        throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch) +
                              ", batch " + std::to_string(begin / cfg.batch_size));
      unet::ModelParams<T> grads = unet::backward(params, fwd.tape, loss.grad);
      adam_step(params, grads, adam);

      loss_sum += loss.value * nb;
      sample_count += nb;
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EpochLog entry{epoch, loss_sum / static_cast<double>(sample_count), wall};
    result.log.push_back(entry);
    if (progress) progress(entry);

    const bool stop = cfg.stop_loss && entry.mean_loss <= *cfg.stop_loss;
    if (!cfg.checkpoint_path.empty() && cfg.checkpoint_every > 0 &&
        (epoch % cfg.checkpoint_every == 0) && epoch != cfg.epochs && !stop)
      unet::save_checkpoint(traindetail::snapshot(params, adam, rng, epoch, cfg.seed),
                            cfg.checkpoint_path);
    if (stop) break;
  }

  if (!cfg.checkpoint_path.empty()) {
    const int completed = result.log.empty() ? start_epoch : result.log.back().epoch;
    unet::save_checkpoint(traindetail::snapshot(params, adam, rng, completed, cfg.seed),
                          cfg.checkpoint_path);
  }
  result.params = std::move(params);
  return result;
}

}  // namespace cloudseg::train
