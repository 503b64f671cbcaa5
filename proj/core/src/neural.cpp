#include "poserefer/neural.hpp"

#include "poserefer/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace poserefer {

AffineLayer::AffineLayer(Index in, Index out, bool with_bias)
    : weight(Matrix::Zero(out, in)),
      bias(Vector::Zero(with_bias ? out : 0)),
      grad_weight(Matrix::Zero(out, in)),
      grad_bias(Vector::Zero(with_bias ? out : 0)),
      has_bias_(with_bias) {}

void AffineLayer::init_xavier(Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in_dim() + out_dim()));
  // Column-major fill order is part of the reproducibility contract.
  for (Index c = 0; c < weight.cols(); ++c) {
    for (Index r = 0; r < weight.rows(); ++r) weight(r, c) = rng.uniform(-limit, limit);
  }
  bias.setZero();
}

void AffineLayer::zero_grad() {
  grad_weight.setZero();
  grad_bias.setZero();
}

Vector AffineLayer::forward(const Vector& x) const {
  if (x.size() != in_dim()) throw std::invalid_argument("affine_forward: input size mismatch");
  Vector y = weight * x;
  if (has_bias_) y += bias;
  return y;
}

Vector AffineLayer::backward(const Vector& x, const Vector& d_out) {
  if (x.size() != in_dim() || d_out.size() != out_dim()) {
    throw std::invalid_argument("affine_backward: shape mismatch");
  }
  grad_weight.noalias() += d_out * x.transpose();
  if (has_bias_) grad_bias += d_out;
  return weight.transpose() * d_out;
}

Matrix AffineLayer::forward_rows(const Matrix& x) const {
  if (x.cols() != in_dim()) throw std::invalid_argument("affine_forward: input width mismatch");
  Matrix y(x.rows(), out_dim());
  y.noalias() = x * weight.transpose();
  if (has_bias_) y.rowwise() += bias.transpose();
  return y;
}

Matrix AffineLayer::backward_rows(const Matrix& x, const Matrix& d_out, bool need_input_grad) {
  if (x.cols() != in_dim() || d_out.cols() != out_dim() || x.rows() != d_out.rows()) {
    throw std::invalid_argument("affine_backward: shape mismatch");
  }
  grad_weight.noalias() += d_out.transpose() * x;
  if (has_bias_) grad_bias += d_out.colwise().sum().transpose();
  if (!need_input_grad) return {};
  Matrix dx(x.rows(), in_dim());
  dx.noalias() = d_out * weight;
  return dx;
}

void AffineLayer::append_params(const std::string& prefix, std::vector<ParamView>& out) {
  out.push_back({prefix + ".weight",
                 {weight.rows(), weight.cols()},
                 {weight.data(), static_cast<std::size_t>(weight.size())},
                 {grad_weight.data(), static_cast<std::size_t>(grad_weight.size())}});
  if (has_bias_) {
    out.push_back({prefix + ".bias",
                   {bias.size()},
                   {bias.data(), static_cast<std::size_t>(bias.size())},
                   {grad_bias.data(), static_cast<std::size_t>(grad_bias.size())}});
  }
}

void EmbeddingTable::init_normal(Rng& rng, double stddev) {
  for (Index c = 0; c < rows.cols(); ++c) {
    for (Index r = 0; r < rows.rows(); ++r) rows(r, c) = stddev * rng.normal();
  }
}

void EmbeddingTable::zero_grad() {
  if (trainable) grad.setZero();
}

void EmbeddingTable::append_params(const std::string& name, std::vector<ParamView>& out) {
  if (!trainable) return;
  out.push_back({name,
                 {rows.rows(), rows.cols()},
                 {rows.data(), static_cast<std::size_t>(rows.size())},
                 {grad.data(), static_cast<std::size_t>(grad.size())}});
}

Vector relu(const Vector& x) { return x.cwiseMax(0.0); }

Vector relu_backward(const Vector& x, const Vector& d_out) {
  return (x.array() > 0.0).select(d_out, 0.0);
}

void relu_inplace(Matrix& x) { x = x.cwiseMax(0.0); }

void relu_backward_inplace(const Matrix& y, Matrix& d) {
  d = (y.array() > 0.0).select(d, 0.0);
}

namespace {

void check_dropout_p(double p) {
  if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("dropout: p must lie in [0, 1)");
}

// Inverted-dropout multipliers: element i is kept iff its 32-bit uniform
// u = bits * 2^-32 satisfies u >= p. Two uniforms per engine draw, low half
// first.
void fill_keep_mask(Rng& rng, double p, Index count, double* out) {
  const double keep_scale = 1.0 / (1.0 - p);
  const auto threshold = static_cast<std::uint32_t>(std::min(std::ceil(p * 0x1.0p32), 4294967295.0));
  thread_local std::vector<std::uint32_t> halves;
  halves.resize(static_cast<std::size_t>(count + 1));
  for (std::size_t k = 0; k + 1 < halves.size(); k += 2) {
    const std::uint64_t b = rng.next_u64();
    halves[k] = static_cast<std::uint32_t>(b);
    halves[k + 1] = static_cast<std::uint32_t>(b >> 32);
  }
  for (Index i = 0; i < count; ++i) out[i] = halves[static_cast<std::size_t>(i)] >= threshold ? keep_scale : 0.0;
}

}  // namespace

Vector dropout(const Vector& x, double p, Mode mode, Rng& rng) {
  check_dropout_p(p);
  if (mode == Mode::Eval || p == 0.0) return x;
  Vector mask(x.size());
  fill_keep_mask(rng, p, x.size(), mask.data());
  return x.cwiseProduct(mask);
}

void dropout_inplace(Matrix& x, double p, Rng& rng, Matrix& mask) {
  check_dropout_p(p);
  mask.resize(x.rows(), x.cols());
  if (p == 0.0) {
    mask.setOnes();
    return;
  }
  fill_keep_mask(rng, p, mask.size(), mask.data());
  x.array() *= mask.array();
}

ZNormResult znorm(const Vector& scores) {
  if (scores.size() < 1) throw std::invalid_argument("znorm: empty input");
  ZNormResult r;
  const double n = static_cast<double>(scores.size());
  // A constant vector must centre to exact zeros; sum/n can round away from the value.
  const bool constant = (scores.array() == scores[0]).all();
  r.mean = constant ? scores[0] : scores.sum() / n;
  r.centered = scores.array() - r.mean;
  r.stddev = std::sqrt(r.centered.squaredNorm() / n);
  r.z = r.centered / (r.stddev + kZNormEps);
  return r;
}

Vector znorm_backward(const ZNormResult& fwd, const Vector& d_z, bool stop_gradient) {
  const double denom = fwd.stddev + kZNormEps;
  if (stop_gradient) return d_z / denom;
  const double n = static_cast<double>(d_z.size());
  Vector d = (d_z.array() - d_z.sum() / n) / denom;
  // d sigma / d s_j = c_j / (n sigma); zero when sigma is zero (c is zero too).
  if (fwd.stddev > 0.0) {
    const double coupling = d_z.dot(fwd.centered) / (n * fwd.stddev * denom * denom);
    d -= coupling * fwd.centered;
  }
  return d;
}

SoftmaxCE softmax_ce(const Vector& scores, std::size_t target) {
  if (target >= static_cast<std::size_t>(scores.size())) {
    throw std::invalid_argument("softmax_ce: target out of range");
  }
  const double m = scores.maxCoeff();
  Vector e = (scores.array() - m).exp();
  const double z = e.sum();
  SoftmaxCE out;
  out.loss = std::log(z) - (scores[static_cast<Index>(target)] - m);
  out.d_scores = e / z;
  out.d_scores[static_cast<Index>(target)] -= 1.0;
  return out;
}

void adamw_step(OptimizerState& state, std::span<const ParamView> params) {
  for (const auto& p : params) {
    for (std::size_t i = 0; i < p.grad.size(); ++i) {
      if (!std::isfinite(p.grad[i])) {
        throw NumericalError("non-finite gradient in '" + p.name + "' at index " +
                             std::to_string(i) + " (step " + std::to_string(state.step + 1) + ")");
      }
    }
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.push_back(Vector::Zero(static_cast<Index>(p.value.size())));
      state.second_moment.push_back(Vector::Zero(static_cast<Index>(p.value.size())));
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw std::invalid_argument("adamw_step: parameter list changed between steps");
  }
  const AdamWConfig& c = state.config;
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  const double decay = 1.0 - c.lr * c.weight_decay;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const ParamView& p = params[k];
    Vector& m = state.first_moment[k];
    Vector& v = state.second_moment[k];
    if (static_cast<std::size_t>(m.size()) != p.value.size()) {
      throw std::invalid_argument("adamw_step: shape of '" + p.name + "' changed");
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      const Index j = static_cast<Index>(i);
      m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g;
      v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g * g;
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      p.value[i] = p.value[i] * decay - c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
  }
}

void ScheduleConfig::validate() const {
  if (!(base_lr > floor_lr && floor_lr >= 0.0)) {
    throw ConfigError("schedule requires base_lr > floor_lr >= 0");
  }
  if (total_epochs < 1) throw ConfigError("schedule requires total_epochs >= 1");
}

double cosine_lr(const ScheduleConfig& s, int epoch) {
  if (epoch < 0 || epoch >= s.total_epochs) throw std::out_of_range("cosine_lr: epoch out of range");
  if (s.total_epochs == 1) return s.base_lr;
  const double progress = static_cast<double>(epoch) / static_cast<double>(s.total_epochs - 1);
  return s.floor_lr + 0.5 * (s.base_lr - s.floor_lr) * (1.0 + std::cos(std::numbers::pi * progress));
}

GradCheckResult grad_check(const std::function<double()>& loss, std::span<const ParamView> params,
                           std::size_t coords, Rng& rng, double h, std::size_t min_per_param,
                           double abs_floor) {
  // (param index, element index) pairs to probe.
  std::set<std::pair<std::size_t, std::size_t>> picks;
  std::size_t total = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const std::size_t size = params[k].value.size();
    total += size;
    const std::size_t want = std::min(size, min_per_param);
    std::set<std::size_t> mine;
    while (mine.size() < want) mine.insert(rng.below(size));
    for (std::size_t i : mine) picks.emplace(k, i);
  }
  const std::size_t target = std::min(coords, total);
  while (picks.size() < target) {
    std::size_t flat = rng.below(total);
    std::size_t k = 0;
    while (flat >= params[k].value.size()) flat -= params[k].value.size(), ++k;
    picks.emplace(k, flat);
  }

  std::vector<double> analytic;
  analytic.reserve(picks.size());
  for (const auto& [k, i] : picks) analytic.push_back(params[k].grad[i]);

  GradCheckResult result;
  std::size_t idx = 0;
  for (const auto& [k, i] : picks) {
    double& v = params[k].value[i];
    const double saved = v;
    v = saved + h;
    const double up = loss();
    v = saved - h;
    const double down = loss();
    v = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic[idx++];
    double rel = 0.0;
    if (!(a == 0.0 && numeric == 0.0)) {
      rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), abs_floor});
    }
    ++result.coords_checked;
    if (rel > result.max_rel_error || result.coords_checked == 1) {
      result.max_rel_error = std::max(result.max_rel_error, rel);
      result.worst_param = params[k].name;
      result.worst_index = i;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

}  // namespace poserefer
