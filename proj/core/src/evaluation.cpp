#include "poserefer/evaluation.hpp"

#include "poserefer/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace poserefer {

FoldPlan loro_folds(const Dataset& dataset) { return loro_folds(dataset.room_ids()); }

FoldPlan loro_folds(std::vector<std::string> room_ids) {
  std::sort(room_ids.begin(), room_ids.end());
  room_ids.erase(std::unique(room_ids.begin(), room_ids.end()), room_ids.end());
  if (room_ids.size() < 2) throw ValidationError("leave-one-room-out needs at least two rooms");
  FoldPlan plan;
  for (const std::string& test : room_ids) {
    Fold f{test, {}};
    for (const std::string& r : room_ids) {
      if (r != test) f.train_rooms.push_back(r);
    }
    plan.folds.push_back(std::move(f));
  }
  return plan;
}

std::optional<double> Accuracy::percent() const {
  if (n == 0) return std::nullopt;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(n);
}

Accuracy aggregate(std::span<const ResultRecord> records, std::size_t k) {
  Accuracy acc;
  for (const ResultRecord& r : records) {
    ++acc.n;
    if (topk(r.rank_of_target, k)) ++acc.hits;
  }
  return acc;
}

std::vector<Stratum> stratify(std::span<const ResultRecord> records, StratifyAxis axis, std::size_t k) {
  std::vector<Stratum> out;
  auto add = [&](std::string label, auto&& member) {
    Stratum s{std::move(label), {}};
    for (const ResultRecord& r : records) {
      if (!member(r)) continue;
      ++s.accuracy.n;
      if (topk(r.rank_of_target, k)) ++s.accuracy.hits;
    }
    out.push_back(std::move(s));
  };
  switch (axis) {
    case StratifyAxis::Tier:
      for (Tier t : {Tier::T1, Tier::T2, Tier::T3, Tier::T4, Tier::T5}) {
        add(std::string(to_string(t)), [t](const ResultRecord& r) { return r.tier == t; });
      }
      break;
    case StratifyAxis::RefType:
      for (RefType t : {RefType::ExactNp, RefType::Pronominal, RefType::Partitive}) {
        add(std::string(to_string(t)), [t](const ResultRecord& r) { return r.ref_type == t; });
      }
      break;
    case StratifyAxis::Regime:
      add("pointing", [](const ResultRecord& r) { return is_pointing_tier(r.tier); });
      add("non_pointing", [](const ResultRecord& r) { return !is_pointing_tier(r.tier); });
      break;
  }
  return out;
}

Accuracy recombine(std::span<const Stratum> strata) {
  Accuracy acc;
  for (const Stratum& s : strata) {
    acc.hits += s.accuracy.hits;
    acc.n += s.accuracy.n;
  }
  return acc;
}

double singleton_oracle(double acc_a, std::size_t n_a, double acc_b, std::size_t n_b) {
  if (n_a == 0 || n_b == 0) throw std::invalid_argument("singleton_oracle: both strata need at least one record");
  return (static_cast<double>(n_a) * acc_a + static_cast<double>(n_b) * acc_b) /
         static_cast<double>(n_a + n_b);
}

namespace {

double t_density(double x, int df) {
  const double v = df;
  const double log_c = std::lgamma((v + 1.0) / 2.0) - std::lgamma(v / 2.0) - 0.5 * std::log(v * std::numbers::pi);
  return std::exp(log_c - (v + 1.0) / 2.0 * std::log1p(x * x / v));
}

template <class F>
double simpson(F&& f, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// Integral of the density over [0, x], x >= 0.
double half_mass(double x, int df) {
  if (x == 0.0) return 0.0;
  auto f = [df](double u) { return t_density(u, df); };
  // Split into unit-ish pieces so the tail is resolved.
  double total = 0.0;
  double a = 0.0;
  while (a < x) {
    const double b = std::min(x, a < 8.0 ? a + 1.0 : a * 2.0);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    total += simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), 1e-14, 40);
    a = b;
  }
  return std::min(total, 0.5);
}

}  // namespace

double student_t_cdf(double t, int df) {
  if (df < 1) throw std::invalid_argument("student_t_cdf: df must be positive");
  if (std::isnan(t)) return t;
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  if (df == 2) return 0.5 + t / (2.0 * std::sqrt(t * t + 2.0));
  const double m = half_mass(std::abs(t), df);
  return t >= 0 ? 0.5 + m : 0.5 - m;
}

TTest paired_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("paired_t: need at least two pairs");
  const std::size_t n = a.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw ValidationError("degenerate differences");
  TTest r;
  r.df = static_cast<int>(n - 1);
  r.mean_difference = mean;
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  if (r.df == 2) {
    const double at = std::abs(r.t);
    r.p_two_sided = 1.0 - at / std::sqrt(at * at + 2.0);
  } else {
    r.p_two_sided = std::clamp(1.0 - 2.0 * half_mass(std::abs(r.t), r.df), 0.0, 1.0);
  }
  return r;
}

}  // namespace poserefer
