#include "poserefer/checkpoint.hpp"

#include "poserefer/error.hpp"

#include <fstream>

namespace poserefer {

using nlohmann::json;

namespace {
constexpr const char* kFormat = "poserefer-checkpoint/1";
}

void save_checkpoint(const FusionModel& model, const CheckpointInfo& info,
                     const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  const json header = {{"format", kFormat},
                       {"config_hash", config_hash(model.config())},
                       {"model_config", to_json(model.config())},
                       {"categories", model.categories()},
                       {"gate_w", model.gate_w},
                       {"seed", info.seed},
                       {"fold", info.fold},
                       {"test_room", info.test_room},
                       {"config_name", info.config_name}};
  out << header.dump() << '\n';
  FusionModel copy = model;
  for (const ParamView& p : copy.parameters()) {
    if (p.name == "gate.w") continue;
    json line = {{"name", p.name}, {"shape", p.shape}, {"data", std::vector<double>(p.value.begin(), p.value.end())}};
    out << line.dump() << '\n';
  }
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, const EmbeddingStore* store,
                                 const std::string& expected_hash) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(path.string(), line_no, "empty checkpoint");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(path.string(), line_no, e.what());
  }
  if (header.value("format", "") != kFormat) {
    throw ParseError(path.string(), line_no, "not a poserefer checkpoint");
  }
  const std::string hash = header.at("config_hash").get<std::string>();
  if (!expected_hash.empty() && hash != expected_hash) {
    throw ConfigError("checkpoint " + path.string() + " has config hash " + hash + ", expected " +
                      expected_hash);
  }
  ModelConfig config = model_config_from_json(header.at("model_config"));
  if (config_hash(config) != hash) {
    throw ConfigError("checkpoint " + path.string() + ": header config does not match its hash");
  }
  CheckpointInfo info;
  info.config_name = header.value("config_name", config.name);
  info.seed = header.at("seed").get<std::uint64_t>();
  info.fold = header.at("fold").get<std::size_t>();
  info.test_room = header.at("test_room").get<std::string>();

  FusionModel model(config, header.at("categories").get<std::vector<std::string>>(), store, 0);
  model.gate_w = header.at("gate_w").get<double>();
  std::vector<ParamView> params = model.parameters();
  for (ParamView& p : params) {
    if (p.name == "gate.w") continue;
    ++line_no;
    if (!std::getline(in, line)) {
      throw ParseError(path.string(), line_no, "missing tensor '" + p.name + "'");
    }
    json t;
    try {
      t = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    if (t.at("name").get<std::string>() != p.name) {
      throw ParseError(path.string(), line_no,
                       "expected tensor '" + p.name + "', found '" + t.at("name").get<std::string>() + "'");
    }
    if (t.at("shape").get<std::vector<Index>>() != p.shape) {
      throw ParseError(path.string(), line_no, "shape mismatch for tensor '" + p.name + "'");
    }
    const auto data = t.at("data").get<std::vector<double>>();
    if (data.size() != p.value.size()) {
      throw ParseError(path.string(), line_no, "size mismatch for tensor '" + p.name + "'");
    }
    std::copy(data.begin(), data.end(), p.value.begin());
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty()) throw ParseError(path.string(), line_no, "unexpected trailing tensor");
  }
  return {std::move(model), info};
}

}  // namespace poserefer
