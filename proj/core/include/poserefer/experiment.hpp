#pragma once

#include "poserefer/affordance.hpp"
#include "poserefer/embedding.hpp"
#include "poserefer/evaluation.hpp"
#include "poserefer/fusion.hpp"
#include "poserefer/training.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace poserefer {

// runconfig.json: model configs (preset names or full objects), seeds,
// training recipe and kernel config.
struct RunConfig {
  std::vector<ModelConfig> configs;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  TrainingConfig training;
  KernelConfig kernel;

  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
std::string config_hash(const RunConfig& c);

// One (config, seed, fold) training run evaluated on its held-out room.
struct CellResult {
  std::string config_name;
  std::uint64_t seed = 0;
  std::size_t fold = 0;
  std::string test_room;
  std::vector<double> alpha_trace;  // empty for single-pathway configs
  std::vector<ResultRecord> records;
};

std::vector<ResultRecord> evaluate_fold(const FusionModel& model,
                                        std::span<const Sample* const> test,
                                        const std::string& config_name, std::uint64_t seed,
                                        std::size_t fold);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample std over seeds; 0 for a single seed
  std::size_t n = 0;
};

MeanStd mean_std(std::span<const double> values);

struct ConfigRow {
  std::string config_name;
  std::vector<double> top1_by_seed;  // percent, each pooling all folds of a seed
  std::vector<double> top5_by_seed;
  MeanStd top1;
  MeanStd top5;
  std::optional<MeanStd> alpha;  // over seeds of the fold-mean final alpha
  std::vector<double> fold_alphas;  // every (seed, fold) final alpha
};

struct StratumRow {
  std::string config_name;
  std::string axis;  // "tier", "ref_type", "regime"
  std::string label;
  std::size_t n = 0;  // stratum size per seed
  std::optional<MeanStd> top1;  // empty for an empty stratum
  std::vector<double> top1_by_seed;
};

struct TTestRow {
  std::string config_a;
  std::string config_b;
  std::optional<TTest> result;  // empty when differences are degenerate
  std::string note;
};

struct ReportTable {
  std::vector<ConfigRow> rows;
  std::vector<StratumRow> strata;
  std::vector<TTestRow> ttests;

  const ConfigRow* row(const std::string& config_name) const;
  const StratumRow* stratum(const std::string& config_name, const std::string& axis,
                            const std::string& label) const;
};

// Comparisons tested when both configs are present.
const std::vector<std::pair<std::string, std::string>>& default_ttest_pairs();

ReportTable build_report(const std::vector<CellResult>& cells,
                         const std::vector<std::string>& config_order,
                         const std::vector<std::uint64_t>& seeds);

struct MatrixResult {
  std::vector<CellResult> cells;  // sorted by (config order, seed, fold)
  std::vector<ResultRecord> records;
  ReportTable report;
};

using ProgressFn = std::function<void(const CellResult&)>;

// Trains and evaluates every (config, seed, fold) cell. Cells are independent
// and run on up to `workers` threads; results are merged in a fixed order so
// the output does not depend on the worker count.
MatrixResult run_matrix(const SampleSet& samples, const FoldPlan& folds,
                        const EmbeddingStore& store, const RunConfig& run, unsigned workers = 1,
                        const ProgressFn& progress = {});

// Output files.
void write_results_jsonl(const std::vector<ResultRecord>& records,
                         const std::filesystem::path& path);
std::vector<ResultRecord> read_results_jsonl(const std::filesystem::path& path);
void write_report_csv(const ReportTable& table, const std::filesystem::path& path);
void write_report_md(const ReportTable& table, const std::filesystem::path& path);
void write_ttests_csv(const ReportTable& table, const std::filesystem::path& path);
// Columns: config, seed, fold, epoch, alpha.
void write_alpha_trace_csv(const std::vector<CellResult>& cells,
                           const std::filesystem::path& path);
void write_alpha_trace_svg(const std::vector<CellResult>& cells,
                           const std::filesystem::path& path);
void write_tier_bars_svg(const ReportTable& table, const std::filesystem::path& path);

// Writes results.jsonl, report.csv, report.md, ttests.csv, alphatrace.csv and
// the two SVG charts into `dir`.
void write_matrix_outputs(const MatrixResult& result, const std::filesystem::path& dir);

}  // namespace poserefer
