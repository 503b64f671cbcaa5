#include "poserefer/embedding.hpp"

#include "poserefer/error.hpp"
#include "poserefer/random.hpp"

#include <fstream>
#include <string>

namespace poserefer {

using nlohmann::json;

bool EmbeddingStore::contains(std::string_view key) const {
  return vectors_.find(key) != vectors_.end();
}

void EmbeddingStore::insert(const std::string& key, Eigen::VectorXd vec) {
  if (static_cast<std::size_t>(vec.size()) != dim_) {
    throw ValidationError("embedding '" + key + "' has dimension " + std::to_string(vec.size()) +
                          ", store dimension is " + std::to_string(dim_));
  }
  vectors_.insert_or_assign(key, std::move(vec));
}

const Eigen::VectorXd& EmbeddingStore::lookup(std::string_view key) const {
  auto it = vectors_.find(key);
  if (it == vectors_.end()) throw MissingKeyError(std::string(key));
  return it->second;
}

void export_embeddings(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << json{{"dim", store.dim()}}.dump() << '\n';
  for (const auto& [key, vec] : store.entries()) {
    out << json{{"key", key}, {"vec", std::vector<double>(vec.begin(), vec.end())}}.dump() << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

EmbeddingStore ingest_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::optional<EmbeddingStore> store;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!store) {
        store.emplace(j.at("dim").get<std::size_t>());
        continue;
      }
      const std::string key = j.at("key").get<std::string>();
      const auto values = j.at("vec").get<std::vector<double>>();
      if (store->contains(key)) throw ParseError(path.string(), line_no, "duplicate key '" + key + "'");
      store->insert(key, Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                           static_cast<Eigen::Index>(values.size())));
    } catch (const json::exception& ex) {
      throw ParseError(path.string(), line_no, ex.what());
    } catch (const ValidationError& ex) {
      throw ParseError(path.string(), line_no, ex.what());
    }
  }
  if (!store) throw ParseError(path.string(), line_no, "missing {\"dim\": D} header");
  return std::move(*store);
}

void PseudoEmbedderConfig::validate() const {
  if (dim < 2) throw ConfigError("pseudo embedder dim must be >= 2");
  if (!(within_group_noise >= 0.0 && within_group_noise <= 1.0)) {
    throw ConfigError("within_group_noise must lie in [0, 1]");
  }
}

json to_json(const PseudoEmbedderConfig& c) {
  return {{"seed", c.seed},
          {"dim", c.dim},
          {"within_group_noise", c.within_group_noise},
          {"group_map", c.group_map}};
}

PseudoEmbedderConfig pseudo_config_from_json(const json& j) {
  PseudoEmbedderConfig c;
  c.seed = j.value("seed", c.seed);
  c.dim = j.value("dim", c.dim);
  c.within_group_noise = j.value("within_group_noise", c.within_group_noise);
  if (j.contains("group_map")) c.group_map = j.at("group_map").get<std::map<std::string, std::string>>();
  c.validate();
  return c;
}

namespace {

Eigen::VectorXd unit_direction(std::uint64_t stream, std::size_t dim) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) v[static_cast<Eigen::Index>(i)] = counter_normal(stream, i);
  return v / v.norm();
}

}  // namespace

Eigen::VectorXd pseudo_embed(const PseudoEmbedderConfig& cfg, std::string_view key) {
  cfg.validate();
  const Eigen::VectorXd own =
      unit_direction(derive_seed(cfg.seed, "key:" + std::string(key)), cfg.dim);
  auto group = cfg.group_map.find(std::string(key));
  if (group == cfg.group_map.end()) return own;
  const Eigen::VectorXd shared = unit_direction(derive_seed(cfg.seed, "group:" + group->second), cfg.dim);
  const Eigen::VectorXd mix =
      (1.0 - cfg.within_group_noise) * shared + cfg.within_group_noise * own;
  return mix / mix.norm();
}

EmbeddingStore pseudo_store(const PseudoEmbedderConfig& cfg, const std::vector<std::string>& keys) {
  EmbeddingStore store(cfg.dim);
  for (const auto& k : keys) store.insert(k, pseudo_embed(cfg, k));
  return store;
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

}  // namespace poserefer
