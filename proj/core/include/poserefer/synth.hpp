#pragma once

#include "poserefer/embedding.hpp"
#include "poserefer/random.hpp"
#include "poserefer/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace poserefer {

struct SynthConfig {
  std::size_t n_rooms = 5;
  std::size_t min_objects = 42;
  std::size_t max_objects = 61;
  std::size_t n_refs = 2000;
  double pointing_fraction = 0.55;
  double frac_exact_np = 0.38;
  double frac_partitive = 0.14;
  double frac_pronominal = 0.48;
  double arm_noise_deg = 8.0;
  double head_noise_deg = 20.0;
  // Probability that a target is drawn among categories with more than one
  // instance in the room, so category alone cannot single it out.
  double distractor_same_category_prob = 0.5;
  // Spread (log-normal sigma) of per-category referability; targets are drawn
  // proportionally to it. Zero makes every object equally likely.
  double category_salience_spread = 1.0;
  // Probability that a raw label carries a color/material/size modifier.
  double modifier_label_prob = 0.3;
  // Objects gather around this many group centers (0: uniform placement).
  std::size_t object_clusters = 0;
  // Per-axis sigma of an object's offset from its group center, in meters.
  double cluster_radius_m = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const SynthConfig& c);
SynthConfig synth_config_from_json(const nlohmann::json& j);

enum class Regime { Pointing, NonPointing };

// The 50-name category vocabulary, most frequent first.
const std::vector<std::string>& synth_category_names();

// Objects placed in a 6 x 6 x 2.5 m box, uniformly or around object_clusters
// group centers, with centroids at least 0.3 m apart. Throws Error when
// placement fails after bounded retries.
Scene gen_scene(const SynthConfig& cfg, std::size_t room_index, Rng& rng);

struct GeneratedReference {
  PoseTrack track;
  ReferenceEvent event;
  std::string utterance_key;
  std::optional<std::string> utterance_group;  // category group for exact_np keys
};

// Speaker placed at least 1 m from the target. Pointing: the dominant arm (both
// arms for T5) aims at the target with angular noise over a 21-frame hold and
// the head loosely follows. Non-pointing: arms move in random directions and
// only head/body weakly face the target.
GeneratedReference gen_reference(const SynthConfig& cfg, const Scene& scene, Regime regime,
                                 RefType ref_type, const std::string& ref_id, Rng& rng);

struct KeyManifest {
  std::vector<std::string> utterance_keys;
  std::vector<std::string> category_keys;
  std::map<std::string, std::string> group_map;
};

nlohmann::json to_json(const KeyManifest& m);
KeyManifest key_manifest_from_json(const nlohmann::json& j);

struct SynthOutput {
  Dataset dataset;
  KeyManifest manifest;
};

// Pure function of the config. Regime and type counts are allocated exactly
// from the configured fractions and then shuffled.
SynthOutput gen_dataset(const SynthConfig& cfg);

// Dataset JSONL files plus manifest.json.
void save_synth_output(const SynthOutput& out, const std::filesystem::path& dir);
KeyManifest load_key_manifest(const std::filesystem::path& path);

// Pseudo-embedder config whose group_map comes from the manifest; category
// names are their own group.
PseudoEmbedderConfig pseudo_config_for(const KeyManifest& m, std::uint64_t seed,
                                       std::size_t dim = 384, double within_group_noise = 0.3);

}  // namespace poserefer
