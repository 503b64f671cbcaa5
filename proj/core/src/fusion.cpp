#include "poserefer/fusion.hpp"

#include "poserefer/error.hpp"
#include "poserefer/hashing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace poserefer {

using nlohmann::json;

std::string_view to_string(CategoryMode m) {
  switch (m) {
    case CategoryMode::None: return "none";
    case CategoryMode::Learned16: return "learned16";
    case CategoryMode::FrozenSemantic: return "frozen_semantic";
  }
  return "?";
}

CategoryMode parse_category_mode(std::string_view s) {
  for (CategoryMode m : {CategoryMode::None, CategoryMode::Learned16, CategoryMode::FrozenSemantic}) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError("unknown category mode '" + std::string(s) + "'");
}

void ModelConfig::validate() const {
  if (!use_pose && !use_text) throw ConfigError("model '" + name + "': no pathway enabled");
  if (!use_pose && pose_cat != CategoryMode::None) {
    throw ConfigError("model '" + name + "': pose_cat set without the pose pathway");
  }
  if (!use_text && text_cat != CategoryMode::None) {
    throw ConfigError("model '" + name + "': text_cat set without the text pathway");
  }
  if (hidden < 1 || pose_feat_dim < 1 || learned_cat_dim < 1 || text_emb_dim < 1) {
    throw ConfigError("model '" + name + "': dimensions must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("model '" + name + "': dropout must lie in [0, 1)");
  if (activation != "relu") throw ConfigError("model '" + name + "': only the relu activation is implemented");
}

json to_json(const ModelConfig& c) {
  return {{"name", c.name},
          {"use_pose", c.use_pose},
          {"use_text", c.use_text},
          {"pose_cat", to_string(c.pose_cat)},
          {"text_cat", to_string(c.text_cat)},
          {"hidden", c.hidden},
          {"pose_feat_dim", c.pose_feat_dim},
          {"learned_cat_dim", c.learned_cat_dim},
          {"text_emb_dim", c.text_emb_dim},
          {"dropout", c.dropout},
          {"text_projector_bias", c.text_projector_bias},
          {"dropout_on_projector", c.dropout_on_projector},
          {"znorm_stop_gradient", c.znorm_stop_gradient},
          {"activation", c.activation}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c = j.contains("preset") ? preset_config(j.at("preset").get<std::string>()) : ModelConfig{};
  c.name = j.value("name", c.name);
  c.use_pose = j.value("use_pose", c.use_pose);
  c.use_text = j.value("use_text", c.use_text);
  if (j.contains("pose_cat")) c.pose_cat = parse_category_mode(j.at("pose_cat").get<std::string>());
  if (j.contains("text_cat")) c.text_cat = parse_category_mode(j.at("text_cat").get<std::string>());
  c.hidden = j.value("hidden", c.hidden);
  c.pose_feat_dim = j.value("pose_feat_dim", c.pose_feat_dim);
  c.learned_cat_dim = j.value("learned_cat_dim", c.learned_cat_dim);
  c.text_emb_dim = j.value("text_emb_dim", c.text_emb_dim);
  c.dropout = j.value("dropout", c.dropout);
  c.text_projector_bias = j.value("text_projector_bias", c.text_projector_bias);
  c.dropout_on_projector = j.value("dropout_on_projector", c.dropout_on_projector);
  c.znorm_stop_gradient = j.value("znorm_stop_gradient", c.znorm_stop_gradient);
  c.activation = j.value("activation", c.activation);
  c.validate();
  return c;
}

std::string config_hash(const ModelConfig& c) { return content_hash(to_json(c).dump()); }

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"P",        "P_cat", "T",         "T_minilm",
                                                 "PT_nocat", "PT",    "PT_minilm", "PT_minilm_both"};
  return names;
}

ModelConfig preset_config(std::string_view name) {
  ModelConfig c;
  c.name = std::string(name);
  using M = CategoryMode;
  auto set = [&](bool pose, bool text, M pose_cat, M text_cat) {
    c.use_pose = pose;
    c.use_text = text;
    c.pose_cat = pose_cat;
    c.text_cat = text_cat;
  };
  if (name == "P") set(true, false, M::None, M::None);
  else if (name == "P_cat") set(true, false, M::Learned16, M::None);
  else if (name == "T") set(false, true, M::None, M::Learned16);
  else if (name == "T_minilm") set(false, true, M::None, M::FrozenSemantic);
  else if (name == "PT_nocat") set(true, true, M::None, M::None);
  else if (name == "PT") set(true, true, M::Learned16, M::Learned16);
  else if (name == "PT_minilm") set(true, true, M::Learned16, M::FrozenSemantic);
  else if (name == "PT_minilm_both") set(true, true, M::FrozenSemantic, M::FrozenSemantic);
  else throw ConfigError("unknown model preset '" + std::string(name) + "'");
  return c;
}

double sigmoid(double w) {
  if (w >= 0.0) return 1.0 / (1.0 + std::exp(-w));
  const double e = std::exp(w);
  return e / (1.0 + e);
}

Vector fuse(const Vector& pose_scores, const Vector& text_scores, double gate_w) {
  if (pose_scores.size() != text_scores.size()) throw std::invalid_argument("fuse: size mismatch");
  const double a = sigmoid(gate_w);
  return a * znorm(pose_scores).z + (1.0 - a) * znorm(text_scores).z;
}

std::vector<std::size_t> rank_candidates(const Vector& scores) {
  std::vector<std::size_t> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[static_cast<Index>(a)] > scores[static_cast<Index>(b)];
  });
  return order;
}

std::size_t rank_of(const Vector& scores, std::size_t target) {
  const double t = scores[static_cast<Index>(target)];
  std::size_t rank = 1;
  for (Index n = 0; n < scores.size(); ++n) {
    if (scores[n] > t || (scores[n] == t && static_cast<std::size_t>(n) < target)) ++rank;
  }
  return rank;
}

std::vector<Index> batch_offsets(std::span<const Sample* const> batch) {
  std::vector<Index> off(batch.size() + 1, 0);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    off[b + 1] = off[b] + static_cast<Index>(batch[b]->size());
  }
  return off;
}

namespace {

EmbeddingTable make_table(CategoryMode mode, const std::vector<std::string>& categories,
                          Index learned_dim, const EmbeddingStore* store, Rng& rng) {
  EmbeddingTable t;
  const Index k = static_cast<Index>(categories.size());
  if (mode == CategoryMode::Learned16) {
    t.rows = Matrix::Zero(k, learned_dim);
    t.grad = Matrix::Zero(k, learned_dim);
    t.trainable = true;
    t.init_normal(rng);
  } else if (mode == CategoryMode::FrozenSemantic) {
    if (store == nullptr) throw ConfigError("frozen_semantic category table needs an embedding store");
    t.rows = Matrix::Zero(k, static_cast<Index>(store->dim()));
    for (Index i = 0; i < k; ++i) {
      const auto& name = categories[static_cast<std::size_t>(i)];
      if (!store->contains(name)) {
        throw ConfigError("frozen_semantic: no vector for category '" + name + "'");
      }
      t.rows.row(i) = store->lookup(name).transpose();
    }
    t.trainable = false;
  }
  return t;
}

Index table_width(const EmbeddingTable& t) { return t.size() == 0 ? 0 : t.dim(); }

// First layer whose input is [dense | category row]. The category block is
// evaluated once per category (table x W_cat^T) and gathered per row, which is
// the same affine map as concatenating the row onto each input. An empty
// `dense_row_of` means row r reads dense row r.
void concat_affine_forward(const AffineLayer& layer, const Matrix& dense,
                           const EmbeddingTable& table, std::span<const int> cat_of_row,
                           std::span<const Index> dense_row_of, Matrix& out) {
  const Index d = dense.cols();
  const Index h = layer.out_dim();
  if (dense_row_of.empty()) {
    out.resize(dense.rows(), h);
    out.noalias() = dense * layer.weight.leftCols(d).transpose();
  } else {
    Matrix dense_part(dense.rows(), h);
    dense_part.noalias() = dense * layer.weight.leftCols(d).transpose();
    const Index rows = static_cast<Index>(dense_row_of.size());
    out.resize(rows, h);
    for (Index j = 0; j < h; ++j) {
      const double* src = dense_part.col(j).data();
      double* dst = out.col(j).data();
      for (Index r = 0; r < rows; ++r) dst[r] = src[dense_row_of[static_cast<std::size_t>(r)]];
    }
  }
  if (table.size() > 0) {
    Matrix per_cat(table.size(), h);
    per_cat.noalias() = table.rows * layer.weight.rightCols(table.dim()).transpose();
    for (Index j = 0; j < h; ++j) {
      const double* src = per_cat.col(j).data();
      double* dst = out.col(j).data();
      for (Index r = 0; r < out.rows(); ++r) dst[r] += src[cat_of_row[static_cast<std::size_t>(r)]];
    }
  }
  if (layer.has_bias()) out.rowwise() += layer.bias.transpose();
}

// Sums rows of `src` into the rows of `dst` named by `index`.
template <class I>
void scatter_rows(const Matrix& src, std::span<const I> index, Matrix& dst) {
  for (Index j = 0; j < src.cols(); ++j) {
    const double* s = src.col(j).data();
    double* t = dst.col(j).data();
    for (Index r = 0; r < src.rows(); ++r) t[index[static_cast<std::size_t>(r)]] += s[r];
  }
}

// Returns the gradient w.r.t. `dense` when requested.
Matrix concat_affine_backward(AffineLayer& layer, const Matrix& dense, EmbeddingTable& table,
                              std::span<const int> cat_of_row, std::span<const Index> dense_row_of,
                              const Matrix& d_out, bool need_input_grad) {
  const Index d = dense.cols();
  Matrix gathered;
  if (!dense_row_of.empty()) {
    gathered = Matrix::Zero(dense.rows(), layer.out_dim());
    scatter_rows(d_out, dense_row_of, gathered);
  }
  const Matrix& d_dense = dense_row_of.empty() ? d_out : gathered;
  layer.grad_weight.leftCols(d).noalias() += d_dense.transpose() * dense;
  if (layer.has_bias()) layer.grad_bias += d_out.colwise().sum().transpose();
  if (table.size() > 0) {
    Matrix d_cat = Matrix::Zero(table.size(), layer.out_dim());
    scatter_rows(d_out, cat_of_row, d_cat);
    layer.grad_weight.rightCols(table.dim()).noalias() += d_cat.transpose() * table.rows;
    if (table.trainable) table.grad.noalias() += d_cat * layer.weight.rightCols(table.dim());
  }
  if (!need_input_grad) return {};
  Matrix d_in(dense.rows(), d);
  d_in.noalias() = d_dense * layer.weight.leftCols(d);
  return d_in;
}

// relu then (optionally) dropout; keeps what backward needs.
struct Activation {
  Matrix relu_out;
  Matrix mask;  // empty when dropout was not applied
  Matrix out;
};

void activate(Matrix pre, double p, Rng* rng, Activation& act) {
  relu_inplace(pre);
  act.relu_out = std::move(pre);
  act.out = act.relu_out;
  if (rng != nullptr) {
    dropout_inplace(act.out, p, *rng, act.mask);
  } else {
    act.mask.resize(0, 0);
  }
}

void activate_backward(const Activation& act, Matrix& d) {
  if (act.mask.size() > 0) d.array() *= act.mask.array();
  relu_backward_inplace(act.relu_out, d);
}

}  // namespace

struct FusionModel::PoseCache {
  std::vector<Index> offsets;
  Matrix dense;  // R x 6
  std::vector<int> cats;
  Activation a1, a2, a3;
};

struct FusionModel::TextCache {
  std::vector<Index> offsets;
  Matrix utterances;  // B x emb
  Matrix projected;   // after optional dropout
  Matrix proj_mask;
  std::vector<int> row_cat;       // per scorer row
  std::vector<Index> row_sample;  // per scorer row
  std::vector<Index> row_of_candidate;
  Activation a1;
};

FusionModel::FusionModel(ModelConfig config, std::vector<std::string> categories,
                         const EmbeddingStore* store, std::uint64_t init_seed)
    : config_(std::move(config)), categories_(std::move(categories)) {
  config_.validate();
  const Index h = config_.hidden;
  if (config_.use_pose) {
    Rng rng(derive_seed(init_seed, "pose"));
    pose.category = make_table(config_.pose_cat, categories_, config_.learned_cat_dim, store, rng);
    pose.encoder1 = AffineLayer(config_.pose_feat_dim + table_width(pose.category), h);
    pose.encoder2 = AffineLayer(h, h);
    pose.scorer1 = AffineLayer(h, h);
    pose.scorer2 = AffineLayer(h, 1);
    for (AffineLayer* l : {&pose.encoder1, &pose.encoder2, &pose.scorer1, &pose.scorer2}) l->init_xavier(rng);
  }
  if (config_.use_text) {
    if (store != nullptr && static_cast<Index>(store->dim()) != config_.text_emb_dim) {
      throw ConfigError("model '" + config_.name + "': text_emb_dim " + std::to_string(config_.text_emb_dim) +
                        " does not match embedding store dim " + std::to_string(store->dim()));
    }
    Rng rng(derive_seed(init_seed, "text"));
    text.category = make_table(config_.text_cat, categories_, config_.learned_cat_dim, store, rng);
    text.projector = AffineLayer(config_.text_emb_dim, h, config_.text_projector_bias);
    text.scorer1 = AffineLayer(h + table_width(text.category), h);
    text.scorer2 = AffineLayer(h, 1);
    for (AffineLayer* l : {&text.projector, &text.scorer1, &text.scorer2}) l->init_xavier(rng);
  }
}

void FusionModel::check_sample(const Sample& s) const {
  const std::size_t n = s.size();
  if (n < 2) throw std::invalid_argument("sample '" + s.ref_id + "' has fewer than 2 candidates");
  if (s.target >= n) throw std::invalid_argument("sample '" + s.ref_id + "': target out of range");
  if (config_.use_pose && (static_cast<std::size_t>(s.pose_features.rows()) != n ||
                           s.pose_features.cols() != config_.pose_feat_dim)) {
    throw std::invalid_argument("sample '" + s.ref_id + "': pose feature shape mismatch");
  }
  if (config_.use_text && s.utterance.size() != config_.text_emb_dim) {
    throw std::invalid_argument("sample '" + s.ref_id + "': utterance dimension mismatch");
  }
  const bool uses_cats = (config_.use_pose && config_.pose_cat != CategoryMode::None) ||
                         (config_.use_text && config_.text_cat != CategoryMode::None);
  if (uses_cats) {
    for (int c : s.category_ids) {
      if (c < 0 || static_cast<std::size_t>(c) >= categories_.size()) {
        throw std::out_of_range("sample '" + s.ref_id + "': category id " + std::to_string(c) +
                                " out of table range");
      }
    }
  }
}

Matrix FusionModel::pose_forward(std::span<const Sample* const> batch, Rng* rng, PoseCache* cache) const {
  PoseCache local;
  PoseCache& c = cache != nullptr ? *cache : local;
  c.offsets = batch_offsets(batch);
  const Index rows = c.offsets.back();
  c.dense.resize(rows, config_.pose_feat_dim);
  c.cats.assign(static_cast<std::size_t>(rows), 0);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Sample& s = *batch[b];
    c.dense.middleRows(c.offsets[b], static_cast<Index>(s.size())) = s.pose_features;
    if (pose.category.size() > 0) {
      std::copy(s.category_ids.begin(), s.category_ids.end(), c.cats.begin() + c.offsets[b]);
    }
  }
  const double p = config_.dropout;
  Matrix pre;
  concat_affine_forward(pose.encoder1, c.dense, pose.category, c.cats, {}, pre);
  activate(std::move(pre), p, rng, c.a1);
  activate(pose.encoder2.forward_rows(c.a1.out), p, rng, c.a2);
  activate(pose.scorer1.forward_rows(c.a2.out), p, rng, c.a3);
  return pose.scorer2.forward_rows(c.a3.out);
}

void FusionModel::pose_backward(const PoseCache& c, const Matrix& d_scores) {
  Matrix d = pose.scorer2.backward_rows(c.a3.out, d_scores);
  activate_backward(c.a3, d);
  d = pose.scorer1.backward_rows(c.a2.out, d);
  activate_backward(c.a2, d);
  d = pose.encoder2.backward_rows(c.a1.out, d);
  activate_backward(c.a1, d);
  concat_affine_backward(pose.encoder1, c.dense, pose.category, c.cats, {}, d, false);
}

Matrix FusionModel::text_forward(std::span<const Sample* const> batch, Rng* rng, TextCache* cache) const {
  TextCache local;
  TextCache& c = cache != nullptr ? *cache : local;
  c.offsets = batch_offsets(batch);
  const Index b_count = static_cast<Index>(batch.size());
  c.utterances.resize(b_count, config_.text_emb_dim);
  c.row_cat.clear();
  c.row_sample.clear();
  c.row_of_candidate.assign(static_cast<std::size_t>(c.offsets.back()), 0);
  const bool with_cat = text.category.size() > 0;
  for (Index b = 0; b < b_count; ++b) {
    const Sample& s = *batch[static_cast<std::size_t>(b)];
    c.utterances.row(b) = s.utterance.transpose();
    if (!with_cat) {
      // The utterance is broadcast: one scorer row serves every candidate.
      const Index row = static_cast<Index>(c.row_cat.size());
      c.row_cat.push_back(0);
      c.row_sample.push_back(b);
      for (std::size_t n = 0; n < s.size(); ++n) c.row_of_candidate[static_cast<std::size_t>(c.offsets[b]) + n] = row;
      continue;
    }
    // One scorer row per distinct category present in the sample.
    std::vector<int> distinct(s.category_ids.begin(), s.category_ids.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const Index first_row = static_cast<Index>(c.row_cat.size());
    for (int cat : distinct) {
      c.row_cat.push_back(cat);
      c.row_sample.push_back(b);
    }
    for (std::size_t n = 0; n < s.size(); ++n) {
      const auto pos = std::lower_bound(distinct.begin(), distinct.end(), s.category_ids[n]) - distinct.begin();
      c.row_of_candidate[static_cast<std::size_t>(c.offsets[b]) + n] = first_row + pos;
    }
  }
  c.projected = text.projector.forward_rows(c.utterances);
  if (rng != nullptr && config_.dropout_on_projector) {
    dropout_inplace(c.projected, config_.dropout, *rng, c.proj_mask);
  } else {
    c.proj_mask.resize(0, 0);
  }
  Matrix pre;
  concat_affine_forward(text.scorer1, c.projected, text.category, c.row_cat, c.row_sample, pre);
  activate(std::move(pre), config_.dropout, rng, c.a1);
  const Matrix row_scores = text.scorer2.forward_rows(c.a1.out);
  Matrix scores(c.offsets.back(), 1);
  for (std::size_t i = 0; i < c.row_of_candidate.size(); ++i) {
    scores(static_cast<Index>(i), 0) = row_scores(c.row_of_candidate[i], 0);
  }
  return scores;
}

void FusionModel::text_backward(const TextCache& c, const Matrix& d_scores) {
  Matrix d_rows = Matrix::Zero(static_cast<Index>(c.row_cat.size()), 1);
  for (std::size_t i = 0; i < c.row_of_candidate.size(); ++i) {
    d_rows(c.row_of_candidate[i], 0) += d_scores(static_cast<Index>(i), 0);
  }
  Matrix d = text.scorer2.backward_rows(c.a1.out, d_rows);
  activate_backward(c.a1, d);
  Matrix d_proj = concat_affine_backward(text.scorer1, c.projected, text.category, c.row_cat, c.row_sample, d, true);
  if (c.proj_mask.size() > 0) d_proj.array() *= c.proj_mask.array();
  text.projector.backward_rows(c.utterances, d_proj, false);
}

Vector FusionModel::pose_scores(const Sample& s) const {
  if (!config_.use_pose) throw std::logic_error("model '" + config_.name + "' has no pose pathway");
  check_sample(s);
  const Sample* one[] = {&s};
  return pose_forward(one, nullptr, nullptr).col(0);
}

Vector FusionModel::text_scores(const Sample& s) const {
  if (!config_.use_text) throw std::logic_error("model '" + config_.name + "' has no text pathway");
  check_sample(s);
  const Sample* one[] = {&s};
  return text_forward(one, nullptr, nullptr).col(0);
}

Vector FusionModel::score(const Sample& s) const {
  if (config_.fused()) return fuse(pose_scores(s), text_scores(s), gate_w);
  return config_.use_pose ? pose_scores(s) : text_scores(s);
}

double FusionModel::loss(std::span<const Sample* const> batch) const {
  double total = 0.0;
  for (const Sample* s : batch) total += softmax_ce(score(*s), s->target).loss;
  return total / static_cast<double>(batch.size());
}

double FusionModel::loss_and_grad(std::span<const Sample* const> batch, Rng* dropout_rng) {
  if (batch.empty()) throw std::invalid_argument("loss_and_grad: empty batch");
  for (const Sample* s : batch) check_sample(*s);
  zero_grad();

  PoseCache pc;
  TextCache tc;
  Matrix pose_out;
  Matrix text_out;
  if (config_.use_pose) pose_out = pose_forward(batch, dropout_rng, &pc);
  if (config_.use_text) text_out = text_forward(batch, dropout_rng, &tc);

  const std::vector<Index> off = batch_offsets(batch);
  Matrix d_pose = config_.use_pose ? Matrix::Zero(off.back(), 1) : Matrix();
  Matrix d_text = config_.use_text ? Matrix::Zero(off.back(), 1) : Matrix();
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  const double a = alpha();
  double total = 0.0;

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Index start = off[b];
    const Index n = off[b + 1] - start;
    const std::size_t target = batch[b]->target;
    if (config_.fused()) {
      const ZNormResult zp = znorm(pose_out.col(0).segment(start, n));
      const ZNormResult zt = znorm(text_out.col(0).segment(start, n));
      const Vector fused = a * zp.z + (1.0 - a) * zt.z;
      const SoftmaxCE ce = softmax_ce(fused, target);
      total += ce.loss;
      const Vector g = ce.d_scores * inv_b;
      grad_gate_w += g.dot(zp.z - zt.z) * a * (1.0 - a);
      d_pose.col(0).segment(start, n) = znorm_backward(zp, a * g, config_.znorm_stop_gradient);
      d_text.col(0).segment(start, n) = znorm_backward(zt, (1.0 - a) * g, config_.znorm_stop_gradient);
    } else if (config_.use_pose) {
      const SoftmaxCE ce = softmax_ce(pose_out.col(0).segment(start, n), target);
      total += ce.loss;
      d_pose.col(0).segment(start, n) = ce.d_scores * inv_b;
    } else {
      const SoftmaxCE ce = softmax_ce(text_out.col(0).segment(start, n), target);
      total += ce.loss;
      d_text.col(0).segment(start, n) = ce.d_scores * inv_b;
    }
  }
  if (config_.use_pose) pose_backward(pc, d_pose);
  if (config_.use_text) text_backward(tc, d_text);
  return total * inv_b;
}

std::vector<ParamView> FusionModel::parameters() {
  std::vector<ParamView> out;
  if (config_.use_pose) {
    pose.encoder1.append_params("pose.encoder1", out);
    pose.encoder2.append_params("pose.encoder2", out);
    pose.scorer1.append_params("pose.scorer1", out);
    pose.scorer2.append_params("pose.scorer2", out);
    pose.category.append_params("pose.category", out);
  }
  if (config_.use_text) {
    text.projector.append_params("text.projector", out);
    text.scorer1.append_params("text.scorer1", out);
    text.scorer2.append_params("text.scorer2", out);
    text.category.append_params("text.category", out);
  }
  if (config_.fused()) out.push_back({"gate.w", {1}, {&gate_w, 1}, {&grad_gate_w, 1}});
  return out;
}

void FusionModel::zero_grad() {
  for (AffineLayer* l : {&pose.encoder1, &pose.encoder2, &pose.scorer1, &pose.scorer2, &text.projector,
                         &text.scorer1, &text.scorer2}) {
    l->zero_grad();
  }
  pose.category.zero_grad();
  text.category.zero_grad();
  grad_gate_w = 0.0;
}

}  // namespace poserefer
