#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace poserefer {

std::uint64_t splitmix64(std::uint64_t x);

// Derive an independent stream seed from a parent seed and a tag. Every
// per-fold, per-component stream in the project comes from chains of this:
//   derive_seed(derive_seed(derive_seed(master, fold), "init"), ...)
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag);

// Seeded stream with portable distributions. std::mt19937_64 output is fixed
// by the standard; the std:: distributions are not, so uniform/normal are
// derived from raw engine bits here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  // Uniform integer in [lo, hi] inclusive.
  long between(long lo, long hi);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  // Index drawn proportionally to non-negative weights.
  std::size_t weighted(std::span<const double> weights);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Counter-based draw: the i-th standard normal of the stream keyed by `key`.
// Pure function of (key, i).
double counter_normal(std::uint64_t key, std::uint64_t i);

}  // namespace poserefer
