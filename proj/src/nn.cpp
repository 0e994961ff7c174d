#include "narme/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace narme {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void fill_uniform(Matrix& m, Rng& rng, double lo, double hi) {
  for (double& v : m.flat()) v = rng.uniform(lo, hi);
}

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

// ---------------------------------------------------------------- DenseLayer

DenseLayer::DenseLayer(std::size_t out, std::size_t in, Activation act, Rng& rng)
    : w(out, in), b(1, out), grad_w(out, in), grad_b(1, out), activation(act) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  fill_uniform(w, rng, -limit, limit);
}

Matrix DenseLayer::forward(const Matrix& x) {
  if (x.cols() != in_width()) throw std::invalid_argument("DenseLayer: input width mismatch");
  Matrix z = matmul_nt(x, w);
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += b(0, j);
  cached_x_ = x;
  cached_z_ = z;
  has_cache_ = true;
  if (activation == Activation::identity) return z;
  Matrix y = z;
  for (double& v : y.flat()) v = v > 0.0 ? v : 0.0;
  return y;
}

Matrix DenseLayer::backward(const Matrix& upstream) {
  if (!has_cache_) throw std::invalid_argument("DenseLayer: backward without forward");
  Matrix g = upstream;
  if (activation == Activation::relu) {
    for (std::size_t i = 0; i < g.size(); ++i)
      if (cached_z_.data()[i] <= 0.0) g.data()[i] = 0.0;
  }
  grad_w = grad_w + matmul_tn(g, cached_x_);
  grad_b = grad_b + col_sums(g);
  return matmul(g, w);
}

void DenseLayer::collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
  out.push_back({&w, &grad_w, prefix + ".w"});
  out.push_back({&b, &grad_b, prefix + ".b"});
}

void DenseLayer::zero_grad() {
  grad_w.fill(0.0);
  grad_b.fill(0.0);
}

// ------------------------------------------------------------------- NacCell

NacCell::NacCell(std::size_t out, std::size_t in, Rng& rng)
    : w_hat(out, in), m_hat(out, in), grad_w_hat(out, in), grad_m_hat(out, in) {
  fill_uniform(w_hat, rng, -0.5, 0.5);
  fill_uniform(m_hat, rng, -0.5, 0.5);
}

Matrix NacCell::effective_weight() const {
  Matrix w(w_hat.rows(), w_hat.cols());
  for (std::size_t i = 0; i < w.size(); ++i)
    w.data()[i] = std::tanh(w_hat.data()[i]) * sigmoid(m_hat.data()[i]);
  return w;
}

Matrix NacCell::forward(const Matrix& x) {
  if (x.cols() != in_width()) throw std::invalid_argument("NacCell: input width mismatch");
  cached_x_ = x;
  has_cache_ = true;
  return matmul_nt(x, effective_weight());
}

void NacCell::accumulate_reparam_grads(const Matrix& grad_w_eff) {
  for (std::size_t i = 0; i < w_hat.size(); ++i) {
    const double t = std::tanh(w_hat.data()[i]);
    const double s = sigmoid(m_hat.data()[i]);
    grad_w_hat.data()[i] += grad_w_eff.data()[i] * (1.0 - t * t) * s;
    grad_m_hat.data()[i] += grad_w_eff.data()[i] * t * s * (1.0 - s);
  }
}

Matrix NacCell::backward(const Matrix& upstream) {
  if (!has_cache_) throw std::invalid_argument("NacCell: backward without forward");
  accumulate_reparam_grads(matmul_tn(upstream, cached_x_));
  return matmul(upstream, effective_weight());
}

void NacCell::collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
  out.push_back({&w_hat, &grad_w_hat, prefix + ".w_hat"});
  out.push_back({&m_hat, &grad_m_hat, prefix + ".m_hat"});
}

void NacCell::zero_grad() {
  grad_w_hat.fill(0.0);
  grad_m_hat.fill(0.0);
}

// ------------------------------------------------------------------ NaluCell

NaluCell::NaluCell(std::size_t out, std::size_t in, Rng& rng, double log_eps)
    : nac(out, in, rng), gate(out, in), grad_gate(out, in), log_eps(log_eps) {
  fill_uniform(gate, rng, -0.5, 0.5);
}

std::pair<Matrix, Matrix> NaluCell::path_outputs(const Matrix& x) const {
  const Matrix w = nac.effective_weight();
  Matrix add = matmul_nt(x, w);
  Matrix logx(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i)
    logx.data()[i] = std::log(std::fabs(x.data()[i]) + log_eps);
  Matrix mul = matmul_nt(logx, w);
  for (double& v : mul.flat()) v = std::exp(v);
  return {std::move(add), std::move(mul)};
}

Matrix NaluCell::forward(const Matrix& x) {
  if (x.cols() != in_width()) throw std::invalid_argument("NaluCell: input width mismatch");
  const Matrix w = nac.effective_weight();
  cached_x_ = x;
  cached_add_ = matmul_nt(x, w);
  cached_logx_ = Matrix(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i)
    cached_logx_.data()[i] = std::log(std::fabs(x.data()[i]) + log_eps);
  cached_mul_ = matmul_nt(cached_logx_, w);
  for (double& v : cached_mul_.flat()) v = std::exp(v);
  cached_gate_ = matmul_nt(x, gate);
  for (double& v : cached_gate_.flat()) v = sigmoid(v);
  has_cache_ = true;

  Matrix y(x.rows(), out_width());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double g = cached_gate_.data()[i];
    y.data()[i] = g * cached_add_.data()[i] + (1.0 - g) * cached_mul_.data()[i];
  }
  return y;
}

Matrix NaluCell::backward(const Matrix& upstream) {
  if (!has_cache_) throw std::invalid_argument("NaluCell: backward without forward");
  const std::size_t n = upstream.size();
  const Matrix w = nac.effective_weight();

  Matrix d_add(upstream.rows(), upstream.cols());
  Matrix d_mul(upstream.rows(), upstream.cols());
  Matrix d_gate_logit(upstream.rows(), upstream.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const double u = upstream.data()[i];
    const double g = cached_gate_.data()[i];
    d_add.data()[i] = u * g;
    d_mul.data()[i] = u * (1.0 - g);
    // through sigmoid: d(gate logit) = u * (a - m) * g * (1 - g)
    d_gate_logit.data()[i] = u * (cached_add_.data()[i] - cached_mul_.data()[i]) * g * (1.0 - g);
  }

  grad_gate = grad_gate + matmul_tn(d_gate_logit, cached_x_);

  // multiplicative path: m = exp(s), s = logx W^T
  Matrix d_s = d_mul;
  for (std::size_t i = 0; i < n; ++i) d_s.data()[i] *= cached_mul_.data()[i];

  Matrix grad_w_eff = matmul_tn(d_add, cached_x_) + matmul_tn(d_s, cached_logx_);
  nac.accumulate_reparam_grads(grad_w_eff);

  // input gradient: gate path + additive path + log path
  Matrix dx = matmul(d_gate_logit, gate) + matmul(d_add, w);
  Matrix d_logx = matmul(d_s, w);
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const double xv = cached_x_.data()[i];
    dx.data()[i] += d_logx.data()[i] * sign0(xv) / (std::fabs(xv) + log_eps);
  }
  return dx;
}

void NaluCell::collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
  nac.collect_params(out, prefix + ".nac");
  out.push_back({&gate, &grad_gate, prefix + ".gate"});
}

void NaluCell::zero_grad() {
  nac.zero_grad();
  grad_gate.fill(0.0);
}

// ------------------------------------------------------------------- Network

void Network::add(std::unique_ptr<Layer> layer) {
  if (!layers_.empty() && layers_.back()->out_width() != layer->in_width())
    throw std::invalid_argument("Network: adjacent layer widths do not compose");
  layers_.push_back(std::move(layer));
}

std::size_t Network::in_width() const {
  if (layers_.empty()) throw std::invalid_argument("Network: no layers");
  return layers_.front()->in_width();
}

std::size_t Network::out_width() const {
  if (layers_.empty()) throw std::invalid_argument("Network: no layers");
  return layers_.back()->out_width();
}

Matrix Network::forward(const Matrix& x) {
  if (layers_.empty()) throw std::invalid_argument("Network: no layers");
  Matrix h = x;
  for (auto& layer : layers_) h = layer->forward(h);
  forwarded_ = true;
  return h;
}

Matrix Network::backward(const Matrix& upstream) {
  if (!forwarded_) throw std::invalid_argument("Network: backward without forward");
  Matrix g = upstream;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

void Network::zero_grad() {
  for (auto& layer : layers_) layer->zero_grad();
}

std::vector<ParamRef> Network::params() {
  std::vector<ParamRef> refs;
  for (std::size_t i = 0; i < layers_.size(); ++i)
    layers_[i]->collect_params(refs, "layer" + std::to_string(i));
  return refs;
}

std::size_t Network::param_count() {
  std::size_t n = 0;
  for (const auto& ref : params()) n += ref.value->size();
  return n;
}

std::vector<double> Network::flat_params() {
  std::vector<double> out;
  for (const auto& ref : params())
    out.insert(out.end(), ref.value->flat().begin(), ref.value->flat().end());
  return out;
}

void Network::set_flat_params(std::span<const double> values) {
  std::size_t off = 0;
  for (const auto& ref : params()) {
    if (off + ref.value->size() > values.size())
      throw std::invalid_argument("set_flat_params: size mismatch");
    std::copy(values.begin() + off, values.begin() + off + ref.value->size(),
              ref.value->flat().begin());
    off += ref.value->size();
  }
  if (off != values.size()) throw std::invalid_argument("set_flat_params: size mismatch");
}

std::vector<double> Network::flat_grads() {
  std::vector<double> out;
  for (const auto& ref : params())
    out.insert(out.end(), ref.grad->flat().begin(), ref.grad->flat().end());
  return out;
}

bool Network::params_finite() {
  for (const auto& ref : params())
    if (!ref.value->all_finite()) return false;
  return true;
}

// ----------------------------------------------------------------- optimizer

std::string to_string(OptKind kind) { return kind == OptKind::sgd ? "sgd" : "adam"; }

OptKind opt_kind_from_string(const std::string& name) {
  if (name == "sgd") return OptKind::sgd;
  if (name == "adam") return OptKind::adam;
  throw std::invalid_argument("unknown optimizer: " + name);
}

void optimizer_step(OptimizerState& state, Network& net) {
  auto refs = net.params();
  std::size_t total = 0;
  for (const auto& ref : refs) total += ref.value->size();
  if (state.kind == OptKind::adam && state.m.empty()) {
    state.m.assign(total, 0.0);
    state.v.assign(total, 0.0);
  }
  if (state.kind == OptKind::adam && state.m.size() != total)
    throw std::invalid_argument("optimizer_step: moment size mismatch");

  state.step_count += 1;
  if (state.kind == OptKind::sgd) {
    for (const auto& ref : refs)
      for (std::size_t i = 0; i < ref.value->size(); ++i)
        ref.value->data()[i] -= state.lr * ref.grad->data()[i];
    return;
  }

  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  std::size_t off = 0;
  for (const auto& ref : refs) {
    for (std::size_t i = 0; i < ref.value->size(); ++i, ++off) {
      const double g = ref.grad->data()[i];
      state.m[off] = state.beta1 * state.m[off] + (1.0 - state.beta1) * g;
      state.v[off] = state.beta2 * state.v[off] + (1.0 - state.beta2) * g * g;
      const double m_hat = state.m[off] / bc1;
      const double v_hat = state.v[off] / bc2;
      ref.value->data()[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.adam_eps);
    }
  }
}

// ---------------------------------------------------------------- grad_check

double grad_check(Network& net, const LossSpec& spec, const Matrix& x,
                  const Matrix& target, double step) {
  net.zero_grad();
  Matrix pred = net.forward(x);
  PredictionBatch batch{pred, target};
  net.backward(loss_grad(spec, batch));
  const std::vector<double> analytic = net.flat_grads();

  std::vector<double> theta = net.flat_params();
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + step;
    net.set_flat_params(theta);
    const double lp = loss_value(spec, {net.forward(x), target});
    theta[i] = saved - step;
    net.set_flat_params(theta);
    const double lm = loss_value(spec, {net.forward(x), target});
    theta[i] = saved;
    const double numeric = (lp - lm) / (2.0 * step);
    const double denom =
        std::max({std::fabs(analytic[i]), std::fabs(numeric), 1e-3});
    worst = std::max(worst, std::fabs(analytic[i] - numeric) / denom);
  }
  net.set_flat_params(theta);
  return worst;
}

}  // namespace narme
