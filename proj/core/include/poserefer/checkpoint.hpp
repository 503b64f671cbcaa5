#pragma once

#include "poserefer/fusion.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace poserefer {

struct CheckpointInfo {
  std::string config_name;
  std::uint64_t seed = 0;
  std::size_t fold = 0;
  std::string test_room;
};

// JSONL tensor format. Header line:
//   {"format": "poserefer-checkpoint/1", "config_hash": ..., "model_config": {...},
//    "categories": [...], "gate_w": w, "seed": ..., "fold": ..., "test_room": ...}
// then one {"name": ..., "shape": [...], "data": [...]} per trainable tensor.
void save_checkpoint(const FusionModel& model, const CheckpointInfo& info,
                     const std::filesystem::path& path);

struct LoadedCheckpoint {
  FusionModel model;
  CheckpointInfo info;
};

// Rebuilds the model (frozen tables from `store`) and restores every tensor.
// Rejects a header whose config hash differs from `expected_hash` when that is
// non-empty, and any name or shape mismatch.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, const EmbeddingStore* store,
                                 const std::string& expected_hash = {});

}  // namespace poserefer
