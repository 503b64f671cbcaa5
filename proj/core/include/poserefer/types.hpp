#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace poserefer {

using Vec3 = Eigen::Vector3d;

// Norm below which a direction or offset counts as degenerate.
inline constexpr double kDegenerateNorm = 1e-9;

enum class Channel : std::size_t { RightArm = 0, LeftArm = 1, Head = 2, Body = 3 };
inline constexpr std::size_t kNumChannels = 4;
inline constexpr std::array<Channel, kNumChannels> kAllChannels = {
    Channel::RightArm, Channel::LeftArm, Channel::Head, Channel::Body};

std::string_view to_string(Channel c);

enum class RefType { ExactNp, Pronominal, Partitive };
inline constexpr std::array<RefType, 3> kAllRefTypes = {RefType::ExactNp, RefType::Pronominal,
                                                        RefType::Partitive};
std::string_view to_string(RefType t);
RefType parse_ref_type(std::string_view s);

enum class Tier { T1, T2, T3, T4, T5 };
inline constexpr std::array<Tier, 5> kAllTiers = {Tier::T1, Tier::T2, Tier::T3, Tier::T4,
                                                  Tier::T5};
std::string_view to_string(Tier t);
Tier parse_tier(std::string_view s);

// T1, T2 and T5 are the pointing tiers; T3 and T4 are weak or no pointing.
constexpr bool is_pointing_tier(Tier t) {
  return t == Tier::T1 || t == Tier::T2 || t == Tier::T5;
}

struct SceneObject {
  std::string object_id;
  Vec3 centroid = Vec3::Zero();
  std::string raw_label;
  std::string category;

  bool operator==(const SceneObject&) const = default;
};

struct Scene {
  std::string room_id;
  std::vector<SceneObject> objects;  // order defines the candidate index

  std::optional<std::size_t> index_of(std::string_view object_id) const;
  bool operator==(const Scene&) const = default;
};

struct ChannelRay {
  Vec3 direction = Vec3::UnitX();
  Vec3 origin = Vec3::Zero();

  bool operator==(const ChannelRay&) const = default;
};

struct PoseFrame {
  std::array<ChannelRay, kNumChannels> rays;

  const ChannelRay& operator[](Channel c) const { return rays[static_cast<std::size_t>(c)]; }
  ChannelRay& operator[](Channel c) { return rays[static_cast<std::size_t>(c)]; }
  bool operator==(const PoseFrame&) const = default;
};

struct PoseTrack {
  std::string ref_id;
  double fps = 30.0;
  std::vector<PoseFrame> frames;

  bool operator==(const PoseTrack&) const = default;
};

struct ReferenceEvent {
  std::string ref_id;
  std::string room_id;
  std::string utterance_key;
  double phrase_start_s = 0.0;
  double phrase_end_s = 0.0;
  long hold_frame = 0;
  std::string target_id;
  RefType ref_type = RefType::ExactNp;
  Tier tier = Tier::T1;

  bool operator==(const ReferenceEvent&) const = default;
};

struct Dataset {
  std::map<std::string, Scene> scenes;       // by room_id
  std::map<std::string, PoseTrack> tracks;   // by ref_id
  std::vector<ReferenceEvent> events;

  const Scene& scene_for(const ReferenceEvent& e) const;
  const PoseTrack& track_for(const ReferenceEvent& e) const;

  // Sorted, de-duplicated canonical categories over all scenes.
  std::vector<std::string> categories() const;
  std::vector<std::string> room_ids() const;

  bool operator==(const Dataset&) const = default;
};

}  // namespace poserefer
