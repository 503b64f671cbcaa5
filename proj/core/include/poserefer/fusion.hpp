#pragma once

#include "poserefer/affordance.hpp"
#include "poserefer/embedding.hpp"
#include "poserefer/neural.hpp"
#include "poserefer/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace poserefer {

enum class CategoryMode { None, Learned16, FrozenSemantic };

std::string_view to_string(CategoryMode m);
CategoryMode parse_category_mode(std::string_view s);

struct ModelConfig {
  std::string name;
  bool use_pose = true;
  bool use_text = true;
  CategoryMode pose_cat = CategoryMode::None;
  CategoryMode text_cat = CategoryMode::None;
  Index hidden = 128;
  Index pose_feat_dim = static_cast<Index>(kPoseFeatureDim);
  Index learned_cat_dim = 16;
  Index text_emb_dim = 384;
  double dropout = 0.3;
  bool text_projector_bias = true;
  bool dropout_on_projector = true;
  bool znorm_stop_gradient = false;
  std::string activation = "relu";

  bool fused() const { return use_pose && use_text; }
  void validate() const;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);
std::string config_hash(const ModelConfig& c);

// The eight ablation rows: P, P_cat, T, T_minilm, PT_nocat, PT, PT_minilm,
// PT_minilm_both.
ModelConfig preset_config(std::string_view name);
const std::vector<std::string>& preset_names();

// One reference prepared for the model. Candidate order is scene order.
struct Sample {
  FeatureMatrix pose_features;  // N x 6
  Vector utterance;
  std::vector<int> category_ids;  // N, indices into the model's category list
  std::size_t target = 0;

  std::string ref_id;
  std::string room_id;
  Tier tier = Tier::T1;
  RefType ref_type = RefType::ExactNp;

  std::size_t size() const { return category_ids.size(); }
};

double sigmoid(double w);

// s = a * znorm(pose) + (1 - a) * znorm(text) with a = sigmoid(gate_w).
Vector fuse(const Vector& pose_scores, const Vector& text_scores, double gate_w);

// Candidate indices by descending score, ties by ascending index.
std::vector<std::size_t> rank_candidates(const Vector& scores);
// 1-based position of `target` in rank_candidates(scores).
std::size_t rank_of(const Vector& scores, std::size_t target);

// Decoupled late-fusion model. The pose and text pathways own disjoint
// parameter sets; the gate is a single scalar.
class FusionModel {
 public:
  // `categories` is the canonical category list that category_ids index.
  // `store` supplies frozen category vectors and may be null when no pathway
  // uses FrozenSemantic.
  FusionModel(ModelConfig config, std::vector<std::string> categories,
              const EmbeddingStore* store, std::uint64_t init_seed);

  const ModelConfig& config() const { return config_; }
  const std::vector<std::string>& categories() const { return categories_; }
  double alpha() const { return sigmoid(gate_w); }

  // Eval-mode raw pathway scores (no dropout, no znorm).
  Vector pose_scores(const Sample& s) const;
  Vector text_scores(const Sample& s) const;
  // Final candidate scores: fused when both pathways are on, otherwise the raw
  // output of the single pathway.
  Vector score(const Sample& s) const;
  std::vector<std::size_t> predict(const Sample& s) const { return rank_candidates(score(s)); }

  // Mean softmax cross-entropy over the batch. Gradients are reset and then
  // accumulated. Dropout is active iff `dropout_rng` is non-null.
  double loss_and_grad(std::span<const Sample* const> batch, Rng* dropout_rng);
  // Loss only, eval mode.
  double loss(std::span<const Sample* const> batch) const;

  // Trainable tensors in a fixed order with stable names.
  std::vector<ParamView> parameters();
  void zero_grad();

  struct PosePathway {
    AffineLayer encoder1, encoder2, scorer1, scorer2;
    EmbeddingTable category;  // empty when pose_cat is None
  };
  struct TextPathway {
    AffineLayer projector, scorer1, scorer2;
    EmbeddingTable category;
  };

  PosePathway pose;
  TextPathway text;
  double gate_w = 0.0;
  double grad_gate_w = 0.0;

 private:
  struct PoseCache;
  struct TextCache;

  void check_sample(const Sample& s) const;
  Matrix pose_forward(std::span<const Sample* const> batch, Rng* rng, PoseCache* cache) const;
  Matrix text_forward(std::span<const Sample* const> batch, Rng* rng, TextCache* cache) const;
  void pose_backward(const PoseCache& cache, const Matrix& d_scores);
  void text_backward(const TextCache& cache, const Matrix& d_scores);

  ModelConfig config_;
  std::vector<std::string> categories_;
};

// Candidates flattened across a batch: offsets[b]..offsets[b+1] are sample b.
std::vector<Index> batch_offsets(std::span<const Sample* const> batch);

}  // namespace poserefer
