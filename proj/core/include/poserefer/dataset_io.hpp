#pragma once

#include "poserefer/types.hpp"
#include "poserefer/vocabulary.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>

namespace poserefer {

// JSONL files inside a dataset directory.
inline constexpr const char* kScenesFile = "scenes.jsonl";
inline constexpr const char* kTracksFile = "tracks.jsonl";
inline constexpr const char* kEventsFile = "events.jsonl";

nlohmann::json to_json(const Vec3& v);
Vec3 vec3_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Scene& scene);
nlohmann::json to_json(const PoseTrack& track);
nlohmann::json to_json(const ReferenceEvent& event);
Scene scene_from_json(const nlohmann::json& j);
PoseTrack track_from_json(const nlohmann::json& j);
ReferenceEvent event_from_json(const nlohmann::json& j);

// Writes scenes.jsonl, tracks.jsonl and events.jsonl into `dir` (created if
// needed). Doubles are written with round-trip precision.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

// Reads and validates a dataset directory. Malformed lines raise ParseError
// with the line number; invariant violations raise ValidationError naming the
// offending record. Scene categories must be fixed points of
// vocab.canonicalize().
Dataset load_dataset(const std::filesystem::path& dir,
                     const CategoryVocabulary& vocab = CategoryVocabulary());

// Structural checks shared by load_dataset and the generator.
void validate_dataset(const Dataset& dataset, const CategoryVocabulary& vocab);

}  // namespace poserefer
