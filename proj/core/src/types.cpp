#include "poserefer/types.hpp"

#include "poserefer/error.hpp"

#include <set>

namespace poserefer {

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::RightArm: return "r_arm";
    case Channel::LeftArm: return "l_arm";
    case Channel::Head: return "head";
    case Channel::Body: return "body";
  }
  return "?";
}

std::string_view to_string(RefType t) {
  switch (t) {
    case RefType::ExactNp: return "exact_np";
    case RefType::Pronominal: return "pronominal";
    case RefType::Partitive: return "partitive";
  }
  return "?";
}

RefType parse_ref_type(std::string_view s) {
  for (RefType t : kAllRefTypes) {
    if (to_string(t) == s) return t;
  }
  throw ValidationError("unknown ref_type '" + std::string(s) + "'");
}

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::T1: return "T1";
    case Tier::T2: return "T2";
    case Tier::T3: return "T3";
    case Tier::T4: return "T4";
    case Tier::T5: return "T5";
  }
  return "?";
}

Tier parse_tier(std::string_view s) {
  for (Tier t : kAllTiers) {
    if (to_string(t) == s) return t;
  }
  throw ValidationError("unknown tier '" + std::string(s) + "'");
}

std::optional<std::size_t> Scene::index_of(std::string_view object_id) const {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].object_id == object_id) return i;
  }
  return std::nullopt;
}

const Scene& Dataset::scene_for(const ReferenceEvent& e) const {
  auto it = scenes.find(e.room_id);
  if (it == scenes.end()) throw MissingKeyError(e.room_id);
  return it->second;
}

const PoseTrack& Dataset::track_for(const ReferenceEvent& e) const {
  auto it = tracks.find(e.ref_id);
  if (it == tracks.end()) throw MissingKeyError(e.ref_id);
  return it->second;
}

std::vector<std::string> Dataset::categories() const {
  std::set<std::string> cats;
  for (const auto& [room, scene] : scenes) {
    for (const auto& obj : scene.objects) cats.insert(obj.category);
  }
  return {cats.begin(), cats.end()};
}

std::vector<std::string> Dataset::room_ids() const {
  std::vector<std::string> ids;
  ids.reserve(scenes.size());
  for (const auto& [room, scene] : scenes) ids.push_back(room);
  return ids;
}

}  // namespace poserefer
