#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace poserefer {

// Frozen key -> vector map for utterances and category names. Vectors are
// stored and returned exactly as inserted.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(std::string_view key) const;

  // Throws ValidationError on a dimension mismatch (message names the key).
  void insert(const std::string& key, Eigen::VectorXd vec);
  // Throws MissingKeyError.
  const Eigen::VectorXd& lookup(std::string_view key) const;

  const std::map<std::string, Eigen::VectorXd, std::less<>>& entries() const { return vectors_; }

  bool operator==(const EmbeddingStore&) const = default;

 private:
  std::size_t dim_;
  std::map<std::string, Eigen::VectorXd, std::less<>> vectors_;
};

// embeddings.jsonl: header {"dim": D}, then {"key": ..., "vec": [...]} per
// line in key order.
void export_embeddings(const EmbeddingStore& store, const std::filesystem::path& path);
EmbeddingStore ingest_embeddings(const std::filesystem::path& path);

// Deterministic stand-in for a frozen sentence encoder. Keys in the same
// group share a group direction, so their cosine similarity is controlled by
// within_group_noise.
struct PseudoEmbedderConfig {
  std::uint64_t seed = 0;
  std::size_t dim = 384;
  std::map<std::string, std::string> group_map;  // key -> semantic group
  double within_group_noise = 0.3;

  void validate() const;
};

nlohmann::json to_json(const PseudoEmbedderConfig& c);
PseudoEmbedderConfig pseudo_config_from_json(const nlohmann::json& j);

// Unit-norm vector, a pure function of (cfg.seed, cfg.dim, group, key).
Eigen::VectorXd pseudo_embed(const PseudoEmbedderConfig& cfg, std::string_view key);

EmbeddingStore pseudo_store(const PseudoEmbedderConfig& cfg,
                            const std::vector<std::string>& keys);

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace poserefer
