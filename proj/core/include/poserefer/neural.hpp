#pragma once

#include "poserefer/random.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace poserefer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Mutable view of one trainable tensor and its gradient accumulator.
struct ParamView {
  std::string name;
  std::vector<Index> shape;
  std::span<double> value;
  std::span<double> grad;
};

// y = W x + b. Batched calls take one input per row.
class AffineLayer {
 public:
  AffineLayer() = default;
  AffineLayer(Index in, Index out, bool with_bias = true);

  Index in_dim() const { return weight.cols(); }
  Index out_dim() const { return weight.rows(); }
  bool has_bias() const { return has_bias_; }

  // Uniform +-sqrt(6 / (fan_in + fan_out)); bias zero.
  void init_xavier(Rng& rng);
  void zero_grad();

  // Throws std::invalid_argument on shape mismatch.
  Vector forward(const Vector& x) const;
  // Returns W^T d_out; accumulates dW += d_out x^T and db += d_out.
  Vector backward(const Vector& x, const Vector& d_out);

  Matrix forward_rows(const Matrix& x) const;
  // Accumulates parameter gradients; returns d_out W (rows = inputs) unless
  // need_input_grad is false, in which case an empty matrix.
  Matrix backward_rows(const Matrix& x, const Matrix& d_out, bool need_input_grad = true);

  void append_params(const std::string& prefix, std::vector<ParamView>& out);

  Matrix weight;  // out x in
  Vector bias;    // out
  Matrix grad_weight;
  Vector grad_bias;

 private:
  bool has_bias_ = true;
};

// Per-category rows. Frozen tables are never registered with the optimizer.
struct EmbeddingTable {
  Matrix rows;  // num_categories x dim
  Matrix grad;
  bool trainable = false;

  Index size() const { return rows.rows(); }
  Index dim() const { return rows.cols(); }
  void init_normal(Rng& rng, double stddev = 0.02);
  void zero_grad();
  void append_params(const std::string& name, std::vector<ParamView>& out);
};

Vector relu(const Vector& x);
// Subgradient 0 at 0; `x` is the pre-activation.
Vector relu_backward(const Vector& x, const Vector& d_out);
void relu_inplace(Matrix& x);
// Zeroes d where the post-activation `y` is not positive.
void relu_backward_inplace(const Matrix& y, Matrix& d);

enum class Mode { Train, Eval };

// Inverted dropout. Train mode zeroes each element with probability p and
// scales survivors by 1/(1-p); eval mode is the identity. Requires p in [0,1).
Vector dropout(const Vector& x, double p, Mode mode, Rng& rng);
// Train-mode dropout applied in place; `mask` receives 0 or 1/(1-p) per entry.
void dropout_inplace(Matrix& x, double p, Rng& rng, Matrix& mask);

inline constexpr double kZNormEps = 1e-8;

struct ZNormResult {
  Vector z;
  Vector centered;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

// (s - mean) / (std_pop + 1e-8); a constant input maps to zeros.
ZNormResult znorm(const Vector& scores);
// Gradient w.r.t. the scores. With stop_gradient the statistics are treated as
// constants.
Vector znorm_backward(const ZNormResult& fwd, const Vector& d_z, bool stop_gradient = false);

struct SoftmaxCE {
  double loss = 0.0;
  Vector d_scores;  // softmax - onehot(target)
};

SoftmaxCE softmax_ce(const Vector& scores, std::size_t target);

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
};

struct OptimizerState {
  AdamWConfig config;
  long step = 0;
  std::vector<Vector> first_moment;
  std::vector<Vector> second_moment;
};

// Decoupled weight decay (p -= lr * wd * p) followed by the bias-corrected
// Adam update. Throws NumericalError naming the tensor if a gradient is not
// finite; parameters are left untouched in that case.
void adamw_step(OptimizerState& state, std::span<const ParamView> params);

struct ScheduleConfig {
  double base_lr = 1e-3;
  int total_epochs = 50;
  double floor_lr = 0.0;

  void validate() const;
};

// floor + (base - floor) * (1 + cos(pi * epoch / (total - 1))) / 2, once per
// epoch, no warmup.
double cosine_lr(const ScheduleConfig& schedule, int epoch);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares the gradients already stored in `params` against central
// differences of `loss`. Every tensor contributes at least
// min(size, min_per_param) coordinates; the rest are drawn uniformly until
// `coords` are checked. Relative error is |a - n| / max(|a|, |n|, abs_floor),
// exactly 0 when both gradients are exactly 0.
GradCheckResult grad_check(const std::function<double()>& loss,
                           std::span<const ParamView> params, std::size_t coords, Rng& rng,
                           double h = 1e-5, std::size_t min_per_param = 4,
                           double abs_floor = 1e-8);

}  // namespace poserefer
