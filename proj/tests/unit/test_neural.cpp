#include "support.hpp"

#include "poserefer/error.hpp"
#include "poserefer/neural.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace poserefer;

namespace {

Vector random_vector(Rng& rng, Index n, double scale = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

}  // namespace

TEST_CASE("affine forward examples") {
  AffineLayer id(2, 2);
  id.weight = Matrix::Identity(2, 2);
  id.bias.setZero();
  Vector x(2);
  x << 1, 2;
  CHECK(id.forward(x) == x);

  AffineLayer c(2, 1);
  c.weight.setZero();
  c.bias << 3;
  CHECK(c.forward(x)[0] == 3.0);
  CHECK_THROWS_AS(c.forward(Vector::Ones(3)), std::invalid_argument);
}

TEST_CASE("affine backward matches central differences") {
  Rng rng(4);
  AffineLayer layer(4, 3);
  layer.init_xavier(rng);
  layer.bias = random_vector(rng, 3);
  const Vector x = random_vector(rng, 4);
  const Vector upstream = random_vector(rng, 3);
  auto loss = [&] { return upstream.dot(layer.forward(x)); };
  layer.zero_grad();
  layer.backward(x, upstream);
  std::vector<ParamView> params;
  layer.append_params("l", params);
  auto r = grad_check(loss, params, 15, rng);
  CHECK(r.max_rel_error < 1e-6);

  // Input gradient.
  const Vector dx = AffineLayer(layer).backward(x, upstream);
  for (Index i = 0; i < 4; ++i) {
    Vector xp = x, xm = x;
    xp[i] += 1e-5;
    xm[i] -= 1e-5;
    const double num = (upstream.dot(layer.forward(xp)) - upstream.dot(layer.forward(xm))) / 2e-5;
    CHECK(std::abs(num - dx[i]) < 1e-6 * std::max(1.0, std::abs(num)));
  }

  // Batched rows agree with the per-vector path.
  Matrix xs(2, 4);
  xs.row(0) = x.transpose();
  xs.row(1) = (2.0 * x).transpose();
  const Matrix ys = layer.forward_rows(xs);
  CHECK((ys.row(0).transpose() - layer.forward(x)).norm() < 1e-12);
  CHECK((ys.row(1).transpose() - layer.forward(2.0 * x)).norm() < 1e-12);
}

TEST_CASE("xavier init bounds") {
  Rng rng(8);
  AffineLayer l(6, 10);
  l.init_xavier(rng);
  const double bound = std::sqrt(6.0 / 16.0);
  CHECK(l.weight.cwiseAbs().maxCoeff() <= bound);
  CHECK(l.weight.cwiseAbs().maxCoeff() > 0.5 * bound);
  CHECK(l.bias.isZero());
}

TEST_CASE("relu") {
  Vector x(3);
  x << -1, 0, 2;
  Vector want(3);
  want << 0, 0, 2;
  CHECK(relu(x) == want);
  CHECK(relu(relu(x)) == relu(x));
  Vector d = Vector::Ones(3);
  Vector g = relu_backward(x, d);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 1.0);

  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    Vector v = random_vector(rng, 5);
    Vector up = random_vector(rng, 5);
    Vector an = relu_backward(v, up);
    for (Index k = 0; k < 5; ++k) {
      if (std::abs(v[k]) < 1e-3) continue;
      Vector p = v, m = v;
      p[k] += 1e-5;
      m[k] -= 1e-5;
      const double num = (up.dot(relu(p)) - up.dot(relu(m))) / 2e-5;
      CHECK(std::abs(num - an[k]) < 1e-8);
    }
  }
}

TEST_CASE("dropout") {
  Rng rng(12);
  const Vector x = random_vector(rng, 50);
  CHECK(dropout(x, 0.3, Mode::Eval, rng) == x);
  CHECK(dropout(x, 0.0, Mode::Train, rng) == x);
  CHECK_THROWS(dropout(x, 1.0, Mode::Train, rng));

  const Index n = 100000;
  Vector ones = Vector::Ones(n);
  Vector y = dropout(ones, 0.3, Mode::Train, rng);
  const double survivors = static_cast<double>((y.array() != 0.0).count()) / static_cast<double>(n);
  CHECK(std::abs(survivors - 0.7) < 0.01);
  for (Index i = 0; i < n; ++i) CHECK((y[i] == 0.0 || std::abs(y[i] - 1.0 / 0.7) < 1e-15));
  Vector xs(n);
  for (Index i = 0; i < n; ++i) xs[i] = 1.0 + rng.uniform();
  const Vector ys = dropout(xs, 0.3, Mode::Train, rng);
  CHECK(std::abs(ys.mean() / xs.mean() - 1.0) < 0.02);

  // Same seed, same mask.
  Rng r1(77), r2(77);
  CHECK(dropout(xs, 0.3, Mode::Train, r1) == dropout(xs, 0.3, Mode::Train, r2));
}

TEST_CASE("znorm examples") {
  Vector s(3);
  s << 1, 2, 3;
  const auto z = znorm(s).z;
  CHECK(std::abs(z[0] + 1.224745) < 1e-6);
  CHECK(std::abs(z[1]) < 1e-12);
  CHECK(std::abs(z[2] - 1.224745) < 1e-6);
  Vector c = Vector::Constant(3, 5.0);
  CHECK(znorm(c).z.isZero(0.0));
  Vector one(1);
  one << 4.0;
  CHECK(znorm(one).z[0] == 0.0);
}

TEST_CASE("znorm statistics and backward (property)") {
  Rng rng(55);
  for (int i = 0; i < 1000; ++i) {
    const Index n = 2 + static_cast<Index>(rng.below(60));
    Vector s = random_vector(rng, n, std::exp(rng.uniform(-3, 3)));
    s.array() += rng.normal() * 10.0;
    const auto r = znorm(s);
    CHECK(std::abs(r.z.mean()) < 1e-9);
    const double pop_std = std::sqrt(r.z.array().square().mean());
    CHECK(std::abs(pop_std - 1.0) < 1e-6);

    if (i % 10 == 0) {
      const Vector up = random_vector(rng, n);
      const Vector an = znorm_backward(r, up);
      for (Index k = 0; k < n; ++k) {
        Vector p = s, m = s;
        const double h = 1e-5 * std::max(1.0, std::abs(s[k]));
        p[k] += h;
        m[k] -= h;
        const double num = (up.dot(znorm(p).z) - up.dot(znorm(m).z)) / (2 * h);
        CHECK(std::abs(num - an[k]) <= 1e-4 * std::max({std::abs(num), std::abs(an[k]), 1e-3}));
      }
    }
  }
}

TEST_CASE("softmax_ce") {
  const auto u = softmax_ce(Vector::Zero(50), 7);
  CHECK(std::abs(u.loss - std::log(50.0)) < 1e-12);
  CHECK(std::abs(u.loss - 3.912023) < 1e-6);
  Vector s(3);
  s << 10, 0, 0;
  const auto r = softmax_ce(s, 0);
  CHECK(std::abs(r.loss - std::log1p(2 * std::exp(-10.0))) < 1e-15);
  CHECK(std::abs(r.loss - 9.08e-5) < 1e-7);

  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const Index n = 2 + static_cast<Index>(rng.below(60));
    Vector v = random_vector(rng, n, 20.0);
    const auto ce = softmax_ce(v, rng.below(static_cast<std::uint64_t>(n)));
    CHECK(ce.loss >= 0.0);
    CHECK(std::isfinite(ce.loss));
    CHECK(std::abs(ce.d_scores.sum()) < 1e-12);
  }
  Vector big(2);
  big << 1000, -1000;
  CHECK(softmax_ce(big, 1).loss == doctest::Approx(2000.0));
  CHECK(softmax_ce(big, 0).loss == 0.0);
}

TEST_CASE("adamw_step") {
  auto one_param = [](double& value, double& grad) {
    return ParamView{"p", {1}, {&value, 1}, {&grad, 1}};
  };
  SUBCASE("zero grad, no decay: unchanged") {
    double v = 0.7, g = 0.0;
    OptimizerState st;
    st.config.weight_decay = 0.0;
    std::vector<ParamView> ps = {one_param(v, g)};
    for (int i = 0; i < 5; ++i) adamw_step(st, ps);
    CHECK(v == 0.7);
  }
  SUBCASE("first step with unit gradient moves by lr") {
    double v = 1.0, g = 1.0;
    OptimizerState st;
    st.config.weight_decay = 0.0;
    std::vector<ParamView> ps = {one_param(v, g)};
    adamw_step(st, ps);
    CHECK(std::abs((1.0 - v) - 1e-3 / (1.0 + 1e-8)) < 1e-15);
    CHECK(st.step == 1);
  }
  SUBCASE("decay-only path") {
    double v = 2.0, g = 0.0;
    OptimizerState st;
    st.config.weight_decay = 1e-4;
    std::vector<ParamView> ps = {one_param(v, g)};
    adamw_step(st, ps);
    CHECK(std::abs(v - 2.0 * (1.0 - 1e-7)) < 1e-15);
    adamw_step(st, ps);
    CHECK(std::abs(v - 2.0 * (1.0 - 1e-7) * (1.0 - 1e-7)) < 1e-15);
  }
  SUBCASE("non-finite gradient aborts and leaves params alone") {
    double v = 1.0, g = std::numeric_limits<double>::quiet_NaN();
    double w = 1.0, gw = 1.0;
    OptimizerState st;
    std::vector<ParamView> ps = {one_param(w, gw), one_param(v, g)};
    ps[1].name = "broken";
    try {
      adamw_step(st, ps);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("broken") != std::string::npos);
    }
    CHECK(v == 1.0);
    CHECK(w == 1.0);
  }
}

TEST_CASE("cosine_lr") {
  ScheduleConfig s;
  CHECK(cosine_lr(s, 0) == 1e-3);
  CHECK(std::abs(cosine_lr(s, 49)) < 1e-18);
  ScheduleConfig odd;
  odd.total_epochs = 51;
  CHECK(std::abs(cosine_lr(odd, 25) - 5e-4) < 1e-15);
  for (int e = 1; e < 50; ++e) CHECK(cosine_lr(s, e) < cosine_lr(s, e - 1));
  ScheduleConfig bad;
  bad.floor_lr = 2e-3;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("grad_check utility") {
  Rng rng(19);
  SUBCASE("affine + relu + softmax_ce composite") {
    AffineLayer l1(5, 7), l2(7, 4);
    l1.init_xavier(rng);
    l2.init_xavier(rng);
    l1.bias = random_vector(rng, 7, 0.1);
    const Vector x = random_vector(rng, 5);
    auto loss = [&] { return softmax_ce(l2.forward(relu(l1.forward(x))), 2).loss; };
    l1.zero_grad();
    l2.zero_grad();
    const Vector pre = l1.forward(x);
    const Vector hid = relu(pre);
    const auto ce = softmax_ce(l2.forward(hid), 2);
    l1.backward(x, relu_backward(pre, l2.backward(hid, ce.d_scores)));
    std::vector<ParamView> ps;
    l1.append_params("l1", ps);
    l2.append_params("l2", ps);
    auto r = grad_check(loss, ps, 70, rng);
    CHECK(r.coords_checked == 70);
    CHECK(r.max_rel_error < 1e-4);
  }
  SUBCASE("linear-only model") {
    AffineLayer l(6, 3);
    l.init_xavier(rng);
    const Vector x = random_vector(rng, 6);
    const Vector w = random_vector(rng, 3);
    auto loss = [&] { return w.dot(l.forward(x)); };
    l.zero_grad();
    l.backward(x, w);
    std::vector<ParamView> ps;
    l.append_params("l", ps);
    CHECK(grad_check(loss, ps, 21, rng).max_rel_error < 1e-8);
  }
  SUBCASE("parameter the loss ignores reports exactly 0") {
    double used = 0.5, g_used = 0.0, unused = 3.0, g_unused = 0.0;
    auto loss = [&] { return used * used; };
    g_used = 2 * used;
    std::vector<ParamView> ps = {{"used", {1}, {&used, 1}, {&g_used, 1}},
                                 {"unused", {1}, {&unused, 1}, {&g_unused, 1}}};
    auto r = grad_check(loss, ps, 2, rng);
    CHECK(r.coords_checked == 2);
    CHECK(r.max_rel_error < 1e-8);
    std::vector<ParamView> only = {ps[1]};
    CHECK(grad_check(loss, only, 1, rng).max_rel_error == 0.0);
  }
}

TEST_CASE("embedding table init") {
  Rng rng(2);
  EmbeddingTable t;
  t.rows = Matrix::Zero(400, 16);
  t.grad = Matrix::Zero(400, 16);
  t.trainable = true;
  t.init_normal(rng);
  const double sd = std::sqrt(t.rows.array().square().mean());
  CHECK(std::abs(sd - 0.02) < 0.001);
}
