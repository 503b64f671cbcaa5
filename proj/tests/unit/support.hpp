#pragma once

#include "poserefer/embedding.hpp"
#include "poserefer/fusion.hpp"
#include "poserefer/random.hpp"
#include "poserefer/synth.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace poserefer::test {

inline Vec3 random_vec(Rng& rng, double scale = 1.0) {
  Vec3 v;
  for (int a = 0; a < 3; ++a) v[a] = scale * rng.normal();
  return v;
}

inline Vec3 random_unit(Rng& rng) {
  Vec3 v = random_vec(rng);
  while (v.norm() < 1e-3) v = random_vec(rng);
  return v.normalized();
}

inline std::vector<std::string> category_names(std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back("cat" + std::to_string(i));
  return out;
}

// Store holding every category name, with the given dimension.
inline EmbeddingStore category_store(const std::vector<std::string>& cats, std::size_t dim,
                                     std::uint64_t seed = 7) {
  PseudoEmbedderConfig cfg;
  cfg.seed = seed;
  cfg.dim = dim;
  return pseudo_store(cfg, cats);
}

inline Sample random_sample(Rng& rng, std::size_t n, Index emb_dim, std::size_t n_cats) {
  Sample s;
  s.pose_features.resize(static_cast<Index>(n), 6);
  for (Index r = 0; r < s.pose_features.rows(); ++r)
    for (Index c = 0; c < 6; ++c) s.pose_features(r, c) = rng.uniform();
  s.utterance = Vector(emb_dim);
  for (Index i = 0; i < emb_dim; ++i) s.utterance[i] = rng.normal();
  for (std::size_t i = 0; i < n; ++i) s.category_ids.push_back(static_cast<int>(rng.below(n_cats)));
  s.target = rng.below(n);
  s.ref_id = "s" + std::to_string(rng.below(1000000));
  s.room_id = "room";
  return s;
}

// Small model dims keep property loops fast.
inline ModelConfig small_config(std::string_view preset, Index emb_dim, Index hidden = 8) {
  ModelConfig c = preset_config(preset);
  c.hidden = hidden;
  c.text_emb_dim = emb_dim;
  c.learned_cat_dim = 4;
  return c;
}

// A few-room synthetic dataset that trains in seconds.
inline SynthConfig tiny_synth(std::size_t n_refs = 120, std::uint64_t seed = 3) {
  SynthConfig c;
  c.n_rooms = 3;
  c.min_objects = 8;
  c.max_objects = 12;
  c.n_refs = n_refs;
  c.seed = seed;
  return c;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("poserefer_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace poserefer::test
