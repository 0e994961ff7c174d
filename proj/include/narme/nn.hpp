#pragma once

#include <memory>
#include <string>
#include <vector>

#include "narme/loss.hpp"
#include "narme/matrix.hpp"
#include "narme/rng.hpp"

namespace narme {

/// A parameter tensor paired with its gradient accumulator.
struct ParamRef {
  Matrix* value;
  Matrix* grad;
  std::string name;
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::size_t in_width() const = 0;
  virtual std::size_t out_width() const = 0;
  /// Computes the layer output and caches whatever backward needs.
  virtual Matrix forward(const Matrix& x) = 0;
  /// Consumes d(loss)/d(output), accumulates parameter gradients, returns
  /// d(loss)/d(input). Requires a prior matching forward.
  virtual Matrix backward(const Matrix& upstream) = 0;
  virtual void collect_params(std::vector<ParamRef>& out, const std::string& prefix) = 0;
  virtual void zero_grad() = 0;
};

enum class Activation { identity, relu };

class DenseLayer : public Layer {
 public:
  DenseLayer(std::size_t out, std::size_t in, Activation act, Rng& rng);

  std::size_t in_width() const override { return w.cols(); }
  std::size_t out_width() const override { return w.rows(); }
  Matrix forward(const Matrix& x) override;
  Matrix backward(const Matrix& upstream) override;
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix) override;
  void zero_grad() override;

  Matrix w;  // [out, in]
  Matrix b;  // [1, out]
  Matrix grad_w;
  Matrix grad_b;
  Activation activation;

 private:
  Matrix cached_x_;
  Matrix cached_z_;  // pre-activation, needed for the relu mask
  bool has_cache_ = false;
};

/// Accumulator cell: effective weight tanh(w_hat) ⊙ sigmoid(m_hat), every
/// entry strictly inside (-1, 1), biased toward {-1, 0, 1} so the cell can
/// learn exact addition/subtraction and extrapolate.
class NacCell : public Layer {
 public:
  NacCell(std::size_t out, std::size_t in, Rng& rng);

  std::size_t in_width() const override { return w_hat.cols(); }
  std::size_t out_width() const override { return w_hat.rows(); }
  Matrix forward(const Matrix& x) override;
  Matrix backward(const Matrix& upstream) override;
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix) override;
  void zero_grad() override;

  Matrix effective_weight() const;
  /// Given d(loss)/d(effective weight), accumulate grads of w_hat and m_hat.
  void accumulate_reparam_grads(const Matrix& grad_w_eff);

  Matrix w_hat;  // [out, in]
  Matrix m_hat;  // [out, in]
  Matrix grad_w_hat;
  Matrix grad_m_hat;

 private:
  Matrix cached_x_;
  bool has_cache_ = false;
};

/// Arithmetic unit: gates between the NAC additive path a = W x and a
/// log-space multiplicative path m = exp(W log(|x| + eps)), with
/// g = sigmoid(G x) and output g ⊙ a + (1 - g) ⊙ m.
class NaluCell : public Layer {
 public:
  NaluCell(std::size_t out, std::size_t in, Rng& rng, double log_eps = 1e-10);

  std::size_t in_width() const override { return gate.cols(); }
  std::size_t out_width() const override { return gate.rows(); }
  Matrix forward(const Matrix& x) override;
  Matrix backward(const Matrix& upstream) override;
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix) override;
  void zero_grad() override;

  /// Additive and multiplicative path outputs for the given input, without
  /// touching the backward cache.
  std::pair<Matrix, Matrix> path_outputs(const Matrix& x) const;

  NacCell nac;
  Matrix gate;  // gate logits G, [out, in]
  Matrix grad_gate;
  double log_eps;

 private:
  Matrix cached_x_, cached_logx_, cached_add_, cached_mul_, cached_gate_;
  bool has_cache_ = false;
};

/// Ordered layer stack with a stable, deterministic flat parameter view
/// (layer order, then each tensor in its declared order, row-major).
class Network {
 public:
  Network() = default;

  void add(std::unique_ptr<Layer> layer);
  std::size_t layer_count() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_[i]; }
  std::size_t in_width() const;
  std::size_t out_width() const;

  Matrix forward(const Matrix& x);
  /// Backpropagates d(loss)/d(output); returns d(loss)/d(input).
  Matrix backward(const Matrix& upstream);
  void zero_grad();

  std::vector<ParamRef> params();
  std::size_t param_count();
  std::vector<double> flat_params();
  void set_flat_params(std::span<const double> values);
  std::vector<double> flat_grads();
  bool params_finite();

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  bool forwarded_ = false;
};

enum class OptKind { sgd, adam };

std::string to_string(OptKind kind);
OptKind opt_kind_from_string(const std::string& name);

struct OptimizerState {
  OptKind kind = OptKind::adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::vector<double> m;  // first moments, flat parameter order
  std::vector<double> v;  // second moments
  long step_count = 0;
};

/// Applies one update from the network's accumulated gradients.
/// sgd: p -= lr * g. adam: bias-corrected moments, standard update.
void optimizer_step(OptimizerState& state, Network& net);

/// Worst guarded relative error between analytic parameter gradients of
/// loss(forward(x)) and central finite differences with the given step.
double grad_check(Network& net, const LossSpec& spec, const Matrix& x,
                  const Matrix& target, double step = 1e-6);

}  // namespace narme
