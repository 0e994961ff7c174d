#include "narme/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace narme {

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::mse: return "mse";
    case LossKind::mae: return "mae";
    case LossKind::huber: return "huber";
    case LossKind::log_cosh: return "log-cosh";
    case LossKind::sr_narme: return "sr-narme";
    case LossKind::dr_narme: return "dr-narme";
  }
  throw std::logic_error("unknown LossKind");
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "mse") return LossKind::mse;
  if (name == "mae") return LossKind::mae;
  if (name == "huber") return LossKind::huber;
  if (name == "log-cosh" || name == "logcosh") return LossKind::log_cosh;
  if (name == "sr-narme") return LossKind::sr_narme;
  if (name == "dr-narme") return LossKind::dr_narme;
  throw std::invalid_argument("unknown loss kind: " + name);
}

std::string to_string(Reduction r) { return r == Reduction::mean ? "mean" : "sum"; }

Reduction reduction_from_string(const std::string& name) {
  if (name == "mean") return Reduction::mean;
  if (name == "sum") return Reduction::sum;
  throw std::invalid_argument("unknown reduction: " + name);
}

void LossSpec::validate() const {
  if (n_t < 1) throw std::invalid_argument("LossSpec: n_t must be >= 1");
  if (m_t < 1) throw std::invalid_argument("LossSpec: m_t must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("LossSpec: delta must be > 0");
  if (!(clamp_eps > 0.0) || clamp_eps > 1e-6)
    throw std::invalid_argument("LossSpec: clamp_eps must be in (0, 1e-6]");
}

void PredictionBatch::validate() const {
  if (!pred.same_shape(target))
    throw std::invalid_argument("PredictionBatch: pred/target shape mismatch");
  if (pred.size() == 0) throw std::invalid_argument("PredictionBatch: empty batch");
  if (!pred.all_finite() || !target.all_finite())
    throw std::invalid_argument("PredictionBatch: non-finite entries");
}

namespace {

// log(cosh(d)) without overflow: |d| + log1p(exp(-2|d|)) - log(2).
double log_cosh_term(double d) {
  const double a = std::fabs(d);
  return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453;
}

double sign(double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); }

double element_value(const LossSpec& s, double d) {
  const double a = std::fabs(d);
  switch (s.kind) {
    case LossKind::mse: return d * d;
    case LossKind::mae: return a;
    case LossKind::huber:
      return a <= s.delta ? 0.5 * d * d : s.delta * (a - 0.5 * s.delta);
    case LossKind::log_cosh: return log_cosh_term(d);
    case LossKind::sr_narme: return std::pow(a, 1.0 / s.n_t);
    case LossKind::dr_narme:
      return std::max(std::pow(a, 1.0 / s.n_t), 1.0) *
             std::min(std::pow(a, 1.0 / s.m_t), 1.0);
  }
  return 0.0;
}

// d(element_value)/dd. Root losses are clamped to 0 for |d| <= clamp_eps.
double element_grad(const LossSpec& s, double d) {
  const double a = std::fabs(d);
  switch (s.kind) {
    case LossKind::mse: return 2.0 * d;
    case LossKind::mae: return sign(d);
    case LossKind::huber: return a <= s.delta ? d : s.delta * sign(d);
    case LossKind::log_cosh: return std::tanh(d);
    case LossKind::sr_narme: {
      if (a <= s.clamp_eps) return 0.0;
      const int n = s.n_t;
      return sign(d) * (1.0 / n) * std::pow(std::max(a, s.clamp_eps), 1.0 / n - 1.0);
    }
    case LossKind::dr_narme: {
      if (a <= s.clamp_eps) return 0.0;
      // min branch strictly inside (clamp_eps, 1); max branch at |d| >= 1.
      const int order = a < 1.0 ? s.m_t : s.n_t;
      return sign(d) * (1.0 / order) *
             std::pow(std::max(a, s.clamp_eps), 1.0 / order - 1.0);
    }
  }
  return 0.0;
}

}  // namespace

double loss_value(const LossSpec& spec, const PredictionBatch& batch) {
  spec.validate();
  batch.validate();
  const double* p = batch.pred.data();
  const double* t = batch.target.data();
  const std::size_t n = batch.count();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += element_value(spec, p[i] - t[i]);
  return spec.reduction == Reduction::mean ? acc / static_cast<double>(n) : acc;
}

Matrix loss_grad(const LossSpec& spec, const PredictionBatch& batch) {
  spec.validate();
  batch.validate();
  const double* p = batch.pred.data();
  const double* t = batch.target.data();
  const std::size_t n = batch.count();
  const double r =
      spec.reduction == Reduction::mean ? 1.0 / static_cast<double>(n) : 1.0;
  Matrix g(batch.pred.rows(), batch.pred.cols());
  for (std::size_t i = 0; i < n; ++i) g.data()[i] = element_grad(spec, p[i] - t[i]) * r;
  return g;
}

LossResult loss_eval(const LossSpec& spec, const PredictionBatch& batch) {
  return LossResult{loss_value(spec, batch), loss_grad(spec, batch)};
}

double narme_term(double d, int n_t, std::optional<int> m_t, double clamp_eps) {
  if (n_t < 1 || (m_t && *m_t < 1)) throw std::invalid_argument("narme_term: orders must be >= 1");
  if (!(clamp_eps > 0.0) || clamp_eps > 1e-6)
    throw std::invalid_argument("narme_term: clamp_eps must be in (0, 1e-6]");
  const double a = std::fabs(d);
  if (!m_t) return std::pow(a, 1.0 / n_t);
  return std::max(std::pow(a, 1.0 / n_t), 1.0) * std::min(std::pow(a, 1.0 / *m_t), 1.0);
}

}  // namespace narme
