#pragma once

#include <optional>
#include <string>

#include "narme/matrix.hpp"

namespace narme {

enum class LossKind { mse, mae, huber, log_cosh, sr_narme, dr_narme };
enum class Reduction { mean, sum };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);
std::string to_string(Reduction r);
Reduction reduction_from_string(const std::string& name);

/// Which loss to evaluate plus every hyperparameter any of the six kinds
/// needs. Fields irrelevant to `kind` are ignored but still validated.
///
///   n_t       root order of the single-root term and of the first
///             (max-side) double-root term
///   m_t       root order of the second (min-side) double-root term
///   delta     huber threshold
///   clamp_eps lower bound on |error| inside root-loss gradients; the
///             gradient of |d|^(1/n) is unbounded as d -> 0, so gradients
///             are defined as 0 for |d| <= clamp_eps
struct LossSpec {
  LossKind kind = LossKind::mse;
  int n_t = 1;
  int m_t = 1;
  double delta = 1.0;
  double clamp_eps = 1e-12;
  Reduction reduction = Reduction::mean;

  /// Throws std::invalid_argument if any field is out of range.
  void validate() const;

  bool operator==(const LossSpec&) const = default;
};

/// Paired prediction/target arrays, shape [batch, outputs].
struct PredictionBatch {
  Matrix pred;
  Matrix target;

  /// Throws std::invalid_argument on shape mismatch, non-finite entries,
  /// or an empty batch.
  void validate() const;
  std::size_t count() const { return pred.size(); }
};

struct LossResult {
  double value = 0.0;
  Matrix grad;
};

/// Reduced loss over the batch. Always >= 0 for every kind.
double loss_value(const LossSpec& spec, const PredictionBatch& batch);

/// Elementwise d(loss_value)/d(pred), same shape as pred. Finite everywhere;
/// the root losses use the clamp rule near zero error.
Matrix loss_grad(const LossSpec& spec, const PredictionBatch& batch);

/// Value and gradient in one pass.
LossResult loss_eval(const LossSpec& spec, const PredictionBatch& batch);

/// Single-element root-loss term. SR term |d|^(1/n_t) when m_t is absent,
/// DR term max(|d|^(1/n_t), 1) * min(|d|^(1/m_t), 1) when present.
double narme_term(double d, int n_t, std::optional<int> m_t = std::nullopt,
                  double clamp_eps = 1e-12);

/// Reference implementation of loss_value: plain element-by-element
/// accumulation, no shared code with the main path. Exists only as an
/// equivalence oracle for tests.
double loss_value_oracle(const LossSpec& spec, const PredictionBatch& batch);

}  // namespace narme
