#pragma once

#include <cmath>

#include "cloudseg/tensor.hpp"

namespace cloudseg::train {

template <class T>
struct LossValue {
  double value = 0.0;
  Tensor4<T> grad;  // dL/d(prediction)
};

// Soft Jaccard loss over every element of the pair:
//   L = -(sum(t * p) + eps) / (sum(t) + sum(p) - sum(t * p) + eps)
// with truth binary and predictions in [0, 1]. L lies in [-1, 0] and reaches
// -1 exactly when the prediction equals the truth.
template <class T>
LossValue<T> jaccard_loss(const Tensor4<T>& truth, const Tensor4<T>& pred, double eps) {
  require_same_shape(truth, pred, "jaccard_loss");
  if (!(eps > 0)) throw DomainError("jaccard_loss: eps must be positive");

  double intersection = 0.0, truth_sum = 0.0, pred_sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double t = static_cast<double>(truth.values[i]);
    const double p = static_cast<double>(pred.values[i]);
    if (t != 0.0 && t != 1.0)
      throw DomainError("jaccard_loss: truth values must be 0 or 1");
    intersection += t * p;
    truth_sum += t;
    pred_sum += p;
  }
  const double s = intersection + eps;
  const double u = truth_sum + pred_sum - intersection + eps;

  LossValue<T> result;
  result.value = -s / u;
  result.grad = Tensor4<T>(pred.batch, pred.channels, pred.height, pred.width);
  const double uu = u * u;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double t = static_cast<double>(truth.values[i]);
    result.grad.values[i] = static_cast<T>(-(t * u - s * (1.0 - t)) / uu);
  }
  return result;
}

/// Mean of per-sample losses over the batch dimension; gradients scale by
/// 1/batch accordingly.
template <class T>
LossValue<T> jaccard_loss_per_sample(const Tensor4<T>& truth, const Tensor4<T>& pred,
                                     double eps) {
  require_same_shape(truth, pred, "jaccard_loss");
  LossValue<T> total;
  total.grad = Tensor4<T>(pred.batch, pred.channels, pred.height, pred.width);
  const std::size_t stride = pred.size() / pred.batch;
  const double inv_batch = 1.0 / pred.batch;
  for (int n = 0; n < pred.batch; ++n) {
    LossValue<T> one = jaccard_loss(truth.batch_slice(n), pred.batch_slice(n), eps);
    total.value += one.value * inv_batch;
    for (std::size_t i = 0; i < stride; ++i)
      total.grad.values[n * stride + i] =
          static_cast<T>(static_cast<double>(one.grad.values[i]) * inv_batch);
  }
  return total;
}

}  // namespace cloudseg::train
