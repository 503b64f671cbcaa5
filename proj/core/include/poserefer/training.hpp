#pragma once

#include "poserefer/affordance.hpp"
#include "poserefer/embedding.hpp"
#include "poserefer/evaluation.hpp"
#include "poserefer/fusion.hpp"
#include "poserefer/neural.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace poserefer {

struct TrainingConfig {
  ScheduleConfig schedule;
  AdamWConfig adamw;  // lr is overwritten by the schedule every epoch
  std::size_t batch_size = 32;

  void validate() const;
};

nlohmann::json to_json(const TrainingConfig& c);
TrainingConfig training_config_from_json(const nlohmann::json& j);

// Samples plus the category list their category_ids index.
struct SampleSet {
  std::vector<std::string> categories;
  std::vector<Sample> samples;
};

// Builds one Sample per event. Every event must have cached features and an
// embedded utterance; events are expected to be validated already.
SampleSet build_samples(const Dataset& dataset, std::span<const ReferenceEvent> events,
                        const FeatureCache& features, const EmbeddingStore& embed);

// Per-run stream seeds, all derived from one master seed:
//   fold_seed = derive_seed(master, fold)
//   init = derive_seed(fold_seed, "init"), shuffle = ..."shuffle", dropout = ..."dropout"
struct RunSeeds {
  std::uint64_t init;
  std::uint64_t shuffle;
  std::uint64_t dropout;
};
RunSeeds run_seeds(std::uint64_t master_seed, std::size_t fold);

struct TrainedFold {
  std::size_t fold = 0;
  std::string test_room;
  FusionModel model;
  std::vector<double> alpha_trace;  // alpha after each epoch
  std::vector<double> epoch_loss;   // mean training loss per epoch
  double alpha_final() const { return alpha_trace.empty() ? model.alpha() : alpha_trace.back(); }
};

// Trains one model on `train` for schedule.total_epochs epochs. Throws
// NumericalError with fold/epoch/batch diagnostics on a non-finite loss.
TrainedFold train_model(std::span<const Sample* const> train, const ModelConfig& config,
                        const std::vector<std::string>& categories, const EmbeddingStore* store,
                        const TrainingConfig& training, std::uint64_t master_seed,
                        std::size_t fold);

// One model per fold, trained on the samples of that fold's training rooms.
std::vector<TrainedFold> train(const SampleSet& samples, const FoldPlan& folds,
                               const ModelConfig& config, const EmbeddingStore* store,
                               const TrainingConfig& training, std::uint64_t master_seed);

// Samples whose room is (or is not) the fold's test room.
std::vector<const Sample*> fold_samples(const SampleSet& samples, const Fold& fold, bool test);

}  // namespace poserefer
