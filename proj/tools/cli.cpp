#include "cli.hpp"

#include "poserefer/checkpoint.hpp"
#include "poserefer/dataset_io.hpp"
#include "poserefer/error.hpp"
#include "poserefer/experiment.hpp"
#include "poserefer/hashing.hpp"
#include "poserefer/synth.hpp"
#include "poserefer/validation.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

namespace poserefer::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string data;
  std::string embeddings;
  std::string features;
  std::string checkpoints;
  std::string from;
  bool pseudo = false;
  bool quiet = false;
};

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError("missing " + what + " path");
  if (!fs::exists(path)) throw Error("missing " + what + ": " + path);
}

json read_json_file(const std::string& path) {
  require_file(path, "config file");
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path, 1, e.what());
  }
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content_hash(bytes);
}

fs::path require_out(const Options& o) {
  if (o.out.empty()) throw ConfigError("--out is required");
  fs::create_directories(o.out);
  return o.out;
}

// Every output directory records the invocation that produced it. No
// timestamps, so reruns stay byte-identical.
void write_run_manifest(const fs::path& dir, const std::string& command, const Options& o,
                        const json& config_hashes, const json& extra = json::object()) {
  json m = {{"tool", "poserefer"},
            {"version", POSEREFER_VERSION},
            {"command", command},
            {"config_path", o.config},
            {"dataset_path", o.data},
            {"embeddings_path", o.embeddings},
            {"features_path", o.features},
            {"output_dir", o.out},
            {"master_seed", o.seed ? json(*o.seed) : json(nullptr)},
            {"config_hashes", config_hashes}};
  for (const auto& [k, v] : extra.items()) m[k] = v;
  std::ofstream out(dir / "run_manifest.json");
  if (!out) throw Error("cannot write " + (dir / "run_manifest.json").string());
  out << m.dump(2) << '\n';
}

json read_run_manifest(const fs::path& dir) {
  const fs::path p = dir / "run_manifest.json";
  require_file(p.string(), "run manifest");
  std::ifstream in(p);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(p.string(), 1, e.what());
  }
}

RunConfig load_run(const Options& o) {
  if (o.config.empty()) throw ConfigError("--config (run config) is required");
  require_file(o.config, "run config");
  RunConfig run = load_run_config(o.config);
  if (o.seed) run.seeds = {*o.seed};
  return run;
}

struct Inputs {
  Dataset dataset;
  EmbeddingStore store{1};
  FeatureCache features;
  SampleSet samples;
  FoldPlan folds;
  std::string embeddings_hash;
};

Inputs load_inputs(const Options& o, const KernelConfig& kernel, bool quiet) {
  require_file(o.data, "dataset directory");
  require_file(o.embeddings, "embeddings file");
  require_file(o.features, "features file");
  Inputs in;
  in.dataset = load_dataset(o.data);
  in.store = ingest_embeddings(o.embeddings);
  in.embeddings_hash = file_hash(o.embeddings);
  in.features = load_feature_cache(o.features);
  if (config_hash(in.features.config) != config_hash(kernel)) {
    throw ConfigError("config-hash mismatch: " + o.features + " was extracted with kernel config " +
                      config_hash(in.features.config) + " but the run config expects " + config_hash(kernel) +
                      "; rerun `poserefer features`");
  }
  const FilterSummary filtered = filter_references(in.dataset, in.store, kernel);
  if (!quiet && !filtered.rejected.empty()) {
    std::cerr << "rejected " << filtered.rejected.size() << " reference(s)";
    const auto& [id, reason] = filtered.rejected.front();
    std::cerr << ", first: " << id << " (" << to_string(reason) << ")\n";
  }
  in.samples = build_samples(in.dataset, filtered.accepted, in.features, in.store);
  in.folds = loro_folds(in.dataset);
  return in;
}

json run_hashes(const RunConfig& run) {
  json h = {{"run_config", config_hash(run)}, {"kernel", config_hash(run.kernel)}};
  for (const auto& c : run.configs) h["model:" + c.name] = config_hash(c);
  return h;
}

void cmd_gen(const Options& o) {
  SynthConfig cfg;
  if (!o.config.empty()) cfg = synth_config_from_json(read_json_file(o.config));
  if (o.seed) cfg.seed = *o.seed;
  const fs::path out = require_out(o);
  const SynthOutput generated = gen_dataset(cfg);
  save_synth_output(generated, out);
  write_run_manifest(out, "gen", o, {{"synth", content_hash(to_json(cfg).dump())}},
                     {{"synth_config", to_json(cfg)}});
  if (!o.quiet) {
    std::cerr << "wrote " << generated.dataset.events.size() << " references in "
              << generated.dataset.scenes.size() << " rooms to " << out.string() << '\n';
  }
}

void cmd_embed(const Options& o) {
  if (o.pseudo == !o.from.empty()) throw ConfigError("embed needs exactly one of --pseudo or --from FILE");
  require_file(o.data, "dataset directory");
  const fs::path out = require_out(o);
  const Dataset dataset = load_dataset(o.data);
  std::vector<std::string> needed;
  for (const auto& e : dataset.events) needed.push_back(e.utterance_key);
  for (const auto& c : dataset.categories()) needed.push_back(c);
  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());

  json hashes;
  EmbeddingStore store(1);
  if (o.pseudo) {
    const fs::path manifest = fs::path(o.data) / "manifest.json";
    require_file(manifest.string(), "key manifest");
    const KeyManifest keys = load_key_manifest(manifest);
    json j = o.config.empty() ? json::object() : read_json_file(o.config);
    PseudoEmbedderConfig cfg = pseudo_config_for(keys, j.value("seed", std::uint64_t{0}), j.value("dim", std::size_t{384}),
                                                 j.value("within_group_noise", 0.3));
    if (o.seed) cfg.seed = *o.seed;
    cfg.validate();
    std::vector<std::string> all = needed;
    all.insert(all.end(), keys.utterance_keys.begin(), keys.utterance_keys.end());
    all.insert(all.end(), keys.category_keys.begin(), keys.category_keys.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    store = pseudo_store(cfg, all);
    hashes["pseudo_embedder"] = content_hash(to_json(cfg).dump());
  } else {
    require_file(o.from, "embedding file");
    store = ingest_embeddings(o.from);
    for (const auto& k : needed) {
      if (!store.contains(k)) throw MissingKeyError(k + " (not in " + o.from + ")");
    }
    hashes["source"] = file_hash(o.from);
  }
  export_embeddings(store, out / "embeddings.jsonl");
  write_run_manifest(out, "embed", o, hashes, {{"embeddings_hash", file_hash(out / "embeddings.jsonl")}});
}

void cmd_features(const Options& o) {
  require_file(o.data, "dataset directory");
  KernelConfig kernel;
  if (!o.config.empty()) {
    const json j = read_json_file(o.config);
    // Accept either a bare kernel config or a run config carrying one.
    kernel = kernel_config_from_json(j.contains("kernel") ? j.at("kernel") : j);
  }
  const fs::path out = require_out(o);
  const Dataset dataset = load_dataset(o.data);
  const FeatureCache cache = extract_features(dataset, kernel);
  save_feature_cache(cache, out / "features.jsonl");
  write_run_manifest(out, "features", o, {{"kernel", config_hash(kernel)}});
}

std::string checkpoint_name(const std::string& config, std::uint64_t seed, std::size_t fold) {
  return config + "/seed" + std::to_string(seed) + "_fold" + std::to_string(fold) + ".jsonl";
}

void cmd_train(const Options& o) {
  const RunConfig run = load_run(o);
  const Inputs in = load_inputs(o, run.kernel, o.quiet);
  const fs::path out = require_out(o);
  std::vector<CellResult> traces;
  for (const ModelConfig& config : run.configs) {
    for (std::uint64_t seed : run.seeds) {
      for (std::size_t f = 0; f < in.folds.folds.size(); ++f) {
        const Fold& fold = in.folds.folds[f];
        const auto train_set = fold_samples(in.samples, fold, false);
        const TrainedFold trained =
            train_model(train_set, config, in.samples.categories, &in.store, run.training, seed, f);
        save_checkpoint(trained.model, {config.name, seed, f, fold.test_room},
                        out / "checkpoints" / checkpoint_name(config.name, seed, f));
        CellResult cell;
        cell.config_name = config.name;
        cell.seed = seed;
        cell.fold = f;
        cell.test_room = fold.test_room;
        if (config.fused()) cell.alpha_trace = trained.alpha_trace;
        traces.push_back(std::move(cell));
        if (!o.quiet) std::cerr << "trained " << config.name << " seed " << seed << " fold " << f << '\n';
      }
    }
  }
  write_alpha_trace_csv(traces, out / "alphatrace.csv");
  write_alpha_trace_svg(traces, out / "alphatrace.svg");
  write_run_manifest(out, "train", o, run_hashes(run),
                     {{"embeddings_hash", in.embeddings_hash}, {"run_config", to_json(run)}});
}

void cmd_eval(const Options& o) {
  if (o.checkpoints.empty()) throw ConfigError("--checkpoints DIR is required");
  require_file(o.checkpoints, "checkpoint directory");
  const json train_manifest = read_run_manifest(o.checkpoints);
  const RunConfig run = run_config_from_json(train_manifest.at("run_config"));
  if (!o.config.empty()) {
    const RunConfig given = load_run_config(o.config);
    for (const ModelConfig& c : given.configs) {
      const auto* want = train_manifest.at("config_hashes").contains("model:" + c.name)
                             ? &train_manifest.at("config_hashes").at("model:" + c.name)
                             : nullptr;
      if (want == nullptr || want->get<std::string>() != config_hash(c)) {
        throw ConfigError("config-hash mismatch: model config '" + c.name + "' in " + o.config +
                          " differs from the one the checkpoints in " + o.checkpoints + " were trained with");
      }
    }
  }
  const Inputs in = load_inputs(o, run.kernel, o.quiet);
  if (in.embeddings_hash != train_manifest.at("embeddings_hash").get<std::string>()) {
    throw ConfigError("config-hash mismatch: " + o.embeddings + " differs from the embeddings the checkpoints in " +
                      o.checkpoints + " were trained with");
  }
  const fs::path out = require_out(o);
  MatrixResult result;
  for (const ModelConfig& config : run.configs) {
    const std::string expected = config_hash(config);
    for (std::uint64_t seed : run.seeds) {
      for (std::size_t f = 0; f < in.folds.folds.size(); ++f) {
        const fs::path path = fs::path(o.checkpoints) / "checkpoints" / checkpoint_name(config.name, seed, f);
        require_file(path.string(), "checkpoint");
        const LoadedCheckpoint ck = load_checkpoint(path, &in.store, expected);
        const Fold& fold = in.folds.folds[f];
        if (ck.info.test_room != fold.test_room) {
          throw ConfigError("checkpoint " + path.string() + " was trained for test room " + ck.info.test_room +
                            ", dataset fold " + std::to_string(f) + " tests " + fold.test_room);
        }
        CellResult cell;
        cell.config_name = config.name;
        cell.seed = seed;
        cell.fold = f;
        cell.test_room = fold.test_room;
        // The checkpoint keeps only the final gate, which is all the report reads.
        if (config.fused()) cell.alpha_trace = {ck.model.alpha()};
        const auto test_set = fold_samples(in.samples, fold, true);
        cell.records = evaluate_fold(ck.model, test_set, config.name, seed, f);
        result.records.insert(result.records.end(), cell.records.begin(), cell.records.end());
        result.cells.push_back(std::move(cell));
      }
    }
  }
  std::vector<std::string> order;
  for (const auto& c : run.configs) order.push_back(c.name);
  result.report = build_report(result.cells, order, run.seeds);
  write_results_jsonl(result.records, out / "results.jsonl");
  write_report_csv(result.report, out / "report.csv");
  write_report_md(result.report, out / "report.md");
  write_ttests_csv(result.report, out / "ttests.csv");
  write_tier_bars_svg(result.report, out / "tier_bars.svg");
  write_run_manifest(out, "eval", o, run_hashes(run), {{"checkpoints_path", o.checkpoints}});
}

void cmd_matrix(const Options& o) {
  const RunConfig run = load_run(o);
  const Inputs in = load_inputs(o, run.kernel, o.quiet);
  const fs::path out = require_out(o);
  ProgressFn progress;
  if (!o.quiet) {
    progress = [](const CellResult& c) {
      std::cerr << "done " << c.config_name << " seed " << c.seed << " fold " << c.fold << " (" << c.test_room
                << ")\n";
    };
  }
  const MatrixResult result = run_matrix(in.samples, in.folds, in.store, run, o.workers, progress);
  write_matrix_outputs(result, out);
  write_run_manifest(out, "matrix", o, run_hashes(run),
                     {{"embeddings_hash", in.embeddings_hash}, {"run_config", to_json(run)}});
}

void add_common(CLI::App* cmd, Options& o, bool needs_inputs) {
  cmd->add_option("--config", o.config, "Config file")->envname("POSEREFER_CONFIG");
  cmd->add_option("--out", o.out, "Output directory")->envname("POSEREFER_OUT");
  cmd->add_option("--seed", o.seed, "Master seed override")->envname("POSEREFER_SEED");
  cmd->add_flag("--quiet", o.quiet, "No progress output");
  if (needs_inputs) {
    cmd->add_option("--data", o.data, "Dataset directory")->envname("POSEREFER_DATA");
    cmd->add_option("--embeddings", o.embeddings, "embeddings.jsonl")->envname("POSEREFER_EMBEDDINGS");
    cmd->add_option("--features", o.features, "features.jsonl")->envname("POSEREFER_FEATURES");
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Pose and language reference resolution: data generation, training and evaluation"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  add_common(gen, o, false);

  auto* embed = app.add_subcommand("embed", "Materialize embeddings.jsonl");
  add_common(embed, o, false);
  embed->add_option("--data", o.data, "Dataset directory")->envname("POSEREFER_DATA");
  embed->add_flag("--pseudo", o.pseudo, "Use the deterministic pseudo-embedder");
  embed->add_option("--from", o.from, "Ingest an externally computed embeddings.jsonl");

  auto* features = app.add_subcommand("features", "Extract pose affordance features");
  add_common(features, o, false);
  features->add_option("--data", o.data, "Dataset directory")->envname("POSEREFER_DATA");

  auto* train = app.add_subcommand("train", "Train every (config, seed, fold) and save checkpoints");
  add_common(train, o, true);

  auto* eval = app.add_subcommand("eval", "Evaluate saved checkpoints");
  add_common(eval, o, true);
  eval->add_option("--checkpoints", o.checkpoints, "Output directory of `train`")->envname("POSEREFER_CHECKPOINTS");

  auto* matrix = app.add_subcommand("matrix", "Train and evaluate the full configuration matrix");
  add_common(matrix, o, true);
  matrix->add_option("--workers", o.workers, "Parallel cells")->envname("POSEREFER_WORKERS")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) cmd_gen(o);
    else if (*embed) cmd_embed(o);
    else if (*features) cmd_features(o);
    else if (*train) cmd_train(o);
    else if (*eval) cmd_eval(o);
    else if (*matrix) cmd_matrix(o);
  } catch (const std::exception& e) {
    std::cerr << "poserefer " << app.get_subcommands().front()->get_name() << ": error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"poserefer"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace poserefer::cli
