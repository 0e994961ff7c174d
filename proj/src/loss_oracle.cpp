// Equivalence oracle for loss_value. Each formula is transcribed directly,
// one element at a time, with no code shared with loss.cpp. Kept naive on
// purpose: the main path is tested against this file.

#include <cmath>

#include "narme/loss.hpp"

namespace narme {

double loss_value_oracle(const LossSpec& spec, const PredictionBatch& batch) {
  spec.validate();
  batch.validate();
  double acc = 0.0;
  const std::size_t n = batch.count();
  for (std::size_t i = 0; i < n; ++i) {
    const double yhat = batch.pred.data()[i];
    const double y = batch.target.data()[i];
    const double diff = yhat - y;
    double term = 0.0;
    switch (spec.kind) {
      case LossKind::mse:
        term = diff * diff;
        break;
      case LossKind::mae:
        term = std::fabs(diff);
        break;
      case LossKind::huber:
        if (std::fabs(diff) <= spec.delta)
          term = 0.5 * diff * diff;
        else
          term = spec.delta * std::fabs(diff) - 0.5 * spec.delta * spec.delta;
        break;
      case LossKind::log_cosh:
        term = std::log(std::cosh(diff));
        break;
      case LossKind::sr_narme:
        term = std::pow(std::fabs(diff), 1.0 / spec.n_t);
        break;
      case LossKind::dr_narme: {
        const double first = std::pow(std::fabs(diff), 1.0 / spec.n_t);
        const double second = std::pow(std::fabs(diff), 1.0 / spec.m_t);
        term = std::max(first, 1.0) * std::min(second, 1.0);
        break;
      }
    }
    acc += term;
  }
  if (spec.reduction == Reduction::mean) acc /= static_cast<double>(n);
  return acc;
}

}  // namespace narme
