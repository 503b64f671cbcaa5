#include "poserefer/training.hpp"

#include "poserefer/error.hpp"

#include <cmath>
#include <numeric>

namespace poserefer {

using nlohmann::json;

void TrainingConfig::validate() const {
  schedule.validate();
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (!(adamw.beta1 >= 0.0 && adamw.beta1 < 1.0) || !(adamw.beta2 >= 0.0 && adamw.beta2 < 1.0)) {
    throw ConfigError("AdamW betas must lie in [0, 1)");
  }
  if (!(adamw.eps > 0.0) || adamw.weight_decay < 0.0) throw ConfigError("invalid AdamW eps or weight decay");
}

json to_json(const TrainingConfig& c) {
  return {{"base_lr", c.schedule.base_lr},
          {"floor_lr", c.schedule.floor_lr},
          {"epochs", c.schedule.total_epochs},
          {"batch_size", c.batch_size},
          {"beta1", c.adamw.beta1},
          {"beta2", c.adamw.beta2},
          {"eps", c.adamw.eps},
          {"weight_decay", c.adamw.weight_decay}};
}

TrainingConfig training_config_from_json(const json& j) {
  TrainingConfig c;
  c.schedule.base_lr = j.value("base_lr", c.schedule.base_lr);
  c.schedule.floor_lr = j.value("floor_lr", c.schedule.floor_lr);
  c.schedule.total_epochs = j.value("epochs", c.schedule.total_epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.adamw.beta1 = j.value("beta1", c.adamw.beta1);
  c.adamw.beta2 = j.value("beta2", c.adamw.beta2);
  c.adamw.eps = j.value("eps", c.adamw.eps);
  c.adamw.weight_decay = j.value("weight_decay", c.adamw.weight_decay);
  c.adamw.lr = c.schedule.base_lr;
  c.validate();
  return c;
}

SampleSet build_samples(const Dataset& dataset, std::span<const ReferenceEvent> events,
                        const FeatureCache& features, const EmbeddingStore& embed) {
  SampleSet set;
  set.categories = dataset.categories();
  std::map<std::string, int, std::less<>> cat_index;
  for (std::size_t i = 0; i < set.categories.size(); ++i) cat_index[set.categories[i]] = static_cast<int>(i);

  set.samples.reserve(events.size());
  for (const ReferenceEvent& e : events) {
    const Scene& scene = dataset.scene_for(e);
    const auto feat = features.by_ref.find(e.ref_id);
    if (feat == features.by_ref.end()) throw MissingKeyError("features for " + e.ref_id);
    const auto target = scene.index_of(e.target_id);
    if (!target) throw ValidationError("reference '" + e.ref_id + "': target not in scene");
    if (static_cast<std::size_t>(feat->second.rows()) != scene.objects.size()) {
      throw ValidationError("reference '" + e.ref_id + "': feature rows do not match the scene");
    }
    Sample s;
    s.pose_features = feat->second;
    s.utterance = embed.lookup(e.utterance_key);
    s.category_ids.reserve(scene.objects.size());
    for (const SceneObject& o : scene.objects) s.category_ids.push_back(cat_index.at(o.category));
    s.target = *target;
    s.ref_id = e.ref_id;
    s.room_id = e.room_id;
    s.tier = e.tier;
    s.ref_type = e.ref_type;
    set.samples.push_back(std::move(s));
  }
  return set;
}

RunSeeds run_seeds(std::uint64_t master_seed, std::size_t fold) {
  const std::uint64_t fold_seed = derive_seed(master_seed, static_cast<std::uint64_t>(fold));
  return {derive_seed(fold_seed, "init"), derive_seed(fold_seed, "shuffle"), derive_seed(fold_seed, "dropout")};
}

TrainedFold train_model(std::span<const Sample* const> train, const ModelConfig& config,
                        const std::vector<std::string>& categories, const EmbeddingStore* store,
                        const TrainingConfig& training, std::uint64_t master_seed,
                        std::size_t fold) {
  training.validate();
  if (train.empty()) throw ValidationError("no training samples for fold " + std::to_string(fold));
  const RunSeeds seeds = run_seeds(master_seed, fold);
  TrainedFold out{fold, {}, FusionModel(config, categories, store, seeds.init), {}, {}};
  FusionModel& model = out.model;
  Rng shuffle_rng(seeds.shuffle);
  Rng dropout_rng(seeds.dropout);
  OptimizerState state;
  state.config = training.adamw;
  const std::vector<ParamView> params = model.parameters();

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<const Sample*> batch;
  batch.reserve(training.batch_size);

  for (int epoch = 0; epoch < training.schedule.total_epochs; ++epoch) {
    state.config.lr = cosine_lr(training.schedule, epoch);
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += training.batch_size) {
      const std::size_t end = std::min(order.size(), start + training.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train[order[i]]);
      const std::string where = "config '" + config.name + "' fold " + std::to_string(fold) + " epoch " +
                                std::to_string(epoch) + " batch " + std::to_string(batches);
      const double loss = model.loss_and_grad(batch, &dropout_rng);
      if (!std::isfinite(loss)) throw NumericalError("non-finite loss at " + where);
      try {
        adamw_step(state, params);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " at " + where);
      }
      loss_sum += loss;
      ++batches;
    }
    out.epoch_loss.push_back(loss_sum / static_cast<double>(batches));
    out.alpha_trace.push_back(model.alpha());
  }
  return out;
}

std::vector<const Sample*> fold_samples(const SampleSet& samples, const Fold& fold, bool test) {
  std::vector<const Sample*> out;
  for (const Sample& s : samples.samples) {
    if ((s.room_id == fold.test_room) == test) out.push_back(&s);
  }
  return out;
}

std::vector<TrainedFold> train(const SampleSet& samples, const FoldPlan& folds,
                               const ModelConfig& config, const EmbeddingStore* store,
                               const TrainingConfig& training, std::uint64_t master_seed) {
  std::vector<TrainedFold> out;
  for (std::size_t f = 0; f < folds.folds.size(); ++f) {
    const auto train_set = fold_samples(samples, folds.folds[f], false);
    TrainedFold t = train_model(train_set, config, samples.categories, store, training, master_seed, f);
    t.test_room = folds.folds[f].test_room;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace poserefer
