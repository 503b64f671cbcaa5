#include "poserefer/experiment.hpp"

#include "poserefer/error.hpp"
#include "poserefer/hashing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

namespace poserefer {

using nlohmann::json;

void RunConfig::validate() const {
  if (configs.empty()) throw ConfigError("run config lists no model configs");
  if (seeds.empty()) throw ConfigError("run config lists no seeds");
  std::vector<std::string> names;
  for (const auto& c : configs) {
    c.validate();
    names.push_back(c.name);
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw ConfigError("run config has duplicate model config names");
  }
  training.validate();
  kernel.validate();
}

json to_json(const RunConfig& c) {
  json configs = json::array();
  for (const auto& m : c.configs) configs.push_back(to_json(m));
  return {{"configs", configs}, {"seeds", c.seeds}, {"training", to_json(c.training)}, {"kernel", to_json(c.kernel)}};
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  for (const auto& item : j.at("configs")) {
    c.configs.push_back(item.is_string() ? preset_config(item.get<std::string>()) : model_config_from_json(item));
  }
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("training")) c.training = training_config_from_json(j.at("training"));
  if (j.contains("kernel")) c.kernel = kernel_config_from_json(j.at("kernel"));
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open run config " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 1, e.what());
  }
  try {
    return run_config_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_hash(const RunConfig& c) { return content_hash(to_json(c).dump()); }

std::vector<ResultRecord> evaluate_fold(const FusionModel& model, std::span<const Sample* const> test,
                                        const std::string& config_name, std::uint64_t seed, std::size_t fold) {
  std::vector<ResultRecord> out;
  out.reserve(test.size());
  for (const Sample* s : test) {
    ResultRecord r;
    r.ref_id = s->ref_id;
    r.config_name = config_name;
    r.seed = seed;
    r.fold = fold;
    r.rank_of_target = rank_of(model.score(*s), s->target);
    r.candidates = s->size();
    r.tier = s->tier;
    r.ref_type = s->ref_type;
    out.push_back(std::move(r));
  }
  return out;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd m;
  m.n = values.size();
  if (values.empty()) return m;
  for (double v : values) m.mean += v;
  m.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return m;
}

const ConfigRow* ReportTable::row(const std::string& config_name) const {
  for (const auto& r : rows) {
    if (r.config_name == config_name) return &r;
  }
  return nullptr;
}

const StratumRow* ReportTable::stratum(const std::string& config_name, const std::string& axis,
                                       const std::string& label) const {
  for (const auto& s : strata) {
    if (s.config_name == config_name && s.axis == axis && s.label == label) return &s;
  }
  return nullptr;
}

const std::vector<std::pair<std::string, std::string>>& default_ttest_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"PT_minilm", "P"}, {"PT_minilm", "T_minilm"}, {"PT_minilm", "PT"}, {"T_minilm", "T"},
      {"PT_minilm_both", "PT_minilm"}};
  return pairs;
}

ReportTable build_report(const std::vector<CellResult>& cells, const std::vector<std::string>& config_order,
                         const std::vector<std::uint64_t>& seeds) {
  ReportTable table;
  const std::pair<StratifyAxis, const char*> axes[] = {
      {StratifyAxis::Tier, "tier"}, {StratifyAxis::RefType, "ref_type"}, {StratifyAxis::Regime, "regime"}};

  for (const std::string& name : config_order) {
    ConfigRow row;
    row.config_name = name;
    std::vector<double> seed_alpha;
    std::vector<std::vector<Stratum>> strata_by_seed[3];
    for (std::uint64_t seed : seeds) {
      std::vector<ResultRecord> recs;
      std::vector<double> alphas;
      for (const CellResult& c : cells) {
        if (c.config_name != name || c.seed != seed) continue;
        recs.insert(recs.end(), c.records.begin(), c.records.end());
        if (!c.alpha_trace.empty()) alphas.push_back(c.alpha_trace.back());
      }
      row.top1_by_seed.push_back(aggregate(recs, 1).percent().value_or(0.0));
      row.top5_by_seed.push_back(aggregate(recs, 5).percent().value_or(0.0));
      if (!alphas.empty()) {
        row.fold_alphas.insert(row.fold_alphas.end(), alphas.begin(), alphas.end());
        seed_alpha.push_back(mean_std(alphas).mean);
      }
      for (std::size_t a = 0; a < 3; ++a) strata_by_seed[a].push_back(stratify(recs, axes[a].first, 1));
    }
    row.top1 = mean_std(row.top1_by_seed);
    row.top5 = mean_std(row.top5_by_seed);
    if (!seed_alpha.empty()) row.alpha = mean_std(seed_alpha);
    table.rows.push_back(std::move(row));

    for (std::size_t a = 0; a < 3; ++a) {
      const auto& first = strata_by_seed[a].front();
      for (std::size_t k = 0; k < first.size(); ++k) {
        StratumRow s;
        s.config_name = name;
        s.axis = axes[a].second;
        s.label = first[k].label;
        s.n = first[k].accuracy.n;
        if (s.n > 0) {
          for (const auto& per_seed : strata_by_seed[a]) {
            s.top1_by_seed.push_back(per_seed[k].accuracy.percent().value_or(0.0));
          }
          s.top1 = mean_std(s.top1_by_seed);
        }
        table.strata.push_back(std::move(s));
      }
    }
  }

  for (const auto& [a, b] : default_ttest_pairs()) {
    const ConfigRow* ra = table.row(a);
    const ConfigRow* rb = table.row(b);
    if (ra == nullptr || rb == nullptr) continue;
    TTestRow t{a, b, std::nullopt, {}};
    if (seeds.size() < 2) {
      t.note = "needs at least two seeds";
    } else {
      try {
        t.result = paired_t(ra->top1_by_seed, rb->top1_by_seed);
      } catch (const ValidationError& e) {
        t.note = e.what();
      }
    }
    table.ttests.push_back(std::move(t));
  }
  return table;
}

MatrixResult run_matrix(const SampleSet& samples, const FoldPlan& folds, const EmbeddingStore& store,
                        const RunConfig& run, unsigned workers, const ProgressFn& progress) {
  run.validate();
  struct Job {
    std::size_t config;
    std::uint64_t seed;
    std::size_t fold;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < run.configs.size(); ++c) {
    for (std::uint64_t seed : run.seeds) {
      for (std::size_t f = 0; f < folds.folds.size(); ++f) jobs.push_back({c, seed, f});
    }
  }
  MatrixResult result;
  result.cells.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        const Job& job = jobs[i];
        const ModelConfig& config = run.configs[job.config];
        const Fold& fold = folds.folds[job.fold];
        const auto train_set = fold_samples(samples, fold, false);
        const auto test_set = fold_samples(samples, fold, true);
        TrainedFold trained =
            train_model(train_set, config, samples.categories, &store, run.training, job.seed, job.fold);
        CellResult cell;
        cell.config_name = config.name;
        cell.seed = job.seed;
        cell.fold = job.fold;
        cell.test_room = fold.test_room;
        if (config.fused()) cell.alpha_trace = trained.alpha_trace;
        cell.records = evaluate_fold(trained.model, test_set, config.name, job.seed, job.fold);
        result.cells[i] = std::move(cell);
        if (progress) {
          std::lock_guard lock(mu);
          progress(result.cells[i]);
        }
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const CellResult& c : result.cells) result.records.insert(result.records.end(), c.records.begin(), c.records.end());
  std::vector<std::string> order;
  for (const auto& c : run.configs) order.push_back(c.name);
  result.report = build_report(result.cells, order, run.seeds);
  return result;
}

}  // namespace poserefer
