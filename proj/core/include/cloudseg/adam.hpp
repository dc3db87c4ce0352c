#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "cloudseg/unet.hpp"

namespace cloudseg::train {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const {
    if (learning_rate < 0) throw DomainError("AdamConfig: learning_rate must be >= 0");
    if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1)
      throw DomainError("AdamConfig: betas must lie in [0, 1)");
    if (eps <= 0) throw DomainError("AdamConfig: eps must be positive");
  }
};

// First/second moment estimates, one pair per parameter tensor in
// visit_tensors order.
template <class T>
struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;

  static AdamState init(const unet::ModelParams<T>& params, const AdamConfig& cfg) {
    cfg.validate();
    AdamState state;
    state.config = cfg;
    unet::visit_tensors(params, [&](const unet::TensorInfo&, const std::vector<T>& values) {
      state.m.emplace_back(values.size(), T(0));
      state.v.emplace_back(values.size(), T(0));
    });
    return state;
  }
};

/// One bias-corrected Adam update:
///   m <- b1*m + (1-b1)*g,  v <- b2*v + (1-b2)*g^2
///   theta <- theta - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
template <class T>
void adam_step(unet::ModelParams<T>& params, const unet::ModelParams<T>& grads,
               AdamState<T>& state) {
  if (!(params.config == grads.config))
    throw ShapeError("adam_step: params and grads built from different configs");
  state.step += 1;
  const double b1 = state.config.beta1, b2 = state.config.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const double lr = state.config.learning_rate, eps = state.config.eps;

  std::vector<const std::vector<T>*> grad_tensors;
  unet::visit_tensors(grads, [&](const unet::TensorInfo&, const std::vector<T>& values) {
    grad_tensors.push_back(&values);
  });

  std::size_t slot = 0;
  unet::visit_tensors(params, [&](const unet::TensorInfo& info, std::vector<T>& values) {
    if (slot >= state.m.size() || state.m[slot].size() != values.size())
      throw ShapeError("adam_step: state does not match params at '" + info.name + "'");
    std::vector<T>& m = state.m[slot];
    std::vector<T>& v = state.v[slot];
    const std::vector<T>& grad = *grad_tensors[slot];
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = static_cast<double>(grad[i]);
      const double mi = b1 * static_cast<double>(m[i]) + (1.0 - b1) * g;
      const double vi = b2 * static_cast<double>(v[i]) + (1.0 - b2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double update = lr * (mi / corr1) / (std::sqrt(vi / corr2) + eps);
      values[i] = static_cast<T>(static_cast<double>(values[i]) - update);
    }
    ++slot;
  });
}

}  // namespace cloudseg::train
