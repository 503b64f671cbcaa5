#pragma once

#include "poserefer/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace poserefer {

struct Fold {
  std::string test_room;
  std::vector<std::string> train_rooms;
};

// Leave-one-room-out plan; rooms in lexicographic order.
struct FoldPlan {
  std::vector<Fold> folds;
};

// Throws ValidationError for fewer than two rooms.
FoldPlan loro_folds(const Dataset& dataset);
FoldPlan loro_folds(std::vector<std::string> room_ids);

struct ResultRecord {
  std::string ref_id;
  std::string config_name;
  std::uint64_t seed = 0;
  std::size_t fold = 0;
  std::size_t rank_of_target = 1;
  std::size_t candidates = 0;
  Tier tier = Tier::T1;
  RefType ref_type = RefType::ExactNp;
};

constexpr bool topk(std::size_t rank, std::size_t k) { return rank <= k; }

struct Accuracy {
  std::size_t hits = 0;
  std::size_t n = 0;
  // Percent; empty when n == 0.
  std::optional<double> percent() const;
};

Accuracy aggregate(std::span<const ResultRecord> records, std::size_t k);

enum class StratifyAxis { Tier, RefType, Regime };

struct Stratum {
  std::string label;
  Accuracy accuracy;
};

// One entry per stratum of the axis, in a fixed order, including empty ones.
// Regime strata are "pointing" (T1, T2, T5) and "non_pointing" (T3, T4).
std::vector<Stratum> stratify(std::span<const ResultRecord> records, StratifyAxis axis,
                              std::size_t k);

// Count-weighted recombination of strata; equals aggregate() exactly.
Accuracy recombine(std::span<const Stratum> strata);

// (n_a * acc_a + n_b * acc_b) / (n_a + n_b); accuracies in percent.
double singleton_oracle(double acc_a, std::size_t n_a, double acc_b, std::size_t n_b);

struct TTest {
  double t = 0.0;
  double p_two_sided = 1.0;
  int df = 0;
  double mean_difference = 0.0;
};

// Paired t-test on a - b. Throws ValidationError("degenerate differences")
// when the differences have zero variance and std::invalid_argument on a
// length mismatch or fewer than two pairs.
TTest paired_t(std::span<const double> a, std::span<const double> b);

// Student t CDF. df == 2 uses the closed form 1/2 + t / (2 sqrt(t^2 + 2));
// other df integrate the density with adaptive Simpson.
double student_t_cdf(double t, int df);

}  // namespace poserefer
