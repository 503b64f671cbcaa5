#include "poserefer/dataset_io.hpp"

#include "poserefer/error.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <string>

namespace poserefer {

using nlohmann::json;
namespace fs = std::filesystem;

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("expected a 3-element array");
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json to_json(const Scene& scene) {
  json objects = json::array();
  for (const auto& o : scene.objects) {
    objects.push_back({{"object_id", o.object_id},
                       {"centroid", to_json(o.centroid)},
                       {"raw_label", o.raw_label},
                       {"category", o.category}});
  }
  return {{"room_id", scene.room_id}, {"objects", std::move(objects)}};
}

Scene scene_from_json(const json& j) {
  Scene s;
  s.room_id = j.at("room_id").get<std::string>();
  for (const auto& o : j.at("objects")) {
    s.objects.push_back({o.at("object_id").get<std::string>(), vec3_from_json(o.at("centroid")),
                         o.at("raw_label").get<std::string>(), o.at("category").get<std::string>()});
  }
  return s;
}

json to_json(const PoseTrack& track) {
  json frames = json::array();
  for (const auto& f : track.frames) {
    json frame = json::object();
    for (Channel c : kAllChannels) {
      frame[std::string(to_string(c))] = {{"direction", to_json(f[c].direction)},
                                          {"origin", to_json(f[c].origin)}};
    }
    frames.push_back(std::move(frame));
  }
  return {{"ref_id", track.ref_id}, {"fps", track.fps}, {"frames", std::move(frames)}};
}

PoseTrack track_from_json(const json& j) {
  PoseTrack t;
  t.ref_id = j.at("ref_id").get<std::string>();
  t.fps = j.at("fps").get<double>();
  for (const auto& jf : j.at("frames")) {
    PoseFrame f;
    for (Channel c : kAllChannels) {
      const auto& ray = jf.at(std::string(to_string(c)));
      f[c].direction = vec3_from_json(ray.at("direction"));
      f[c].origin = vec3_from_json(ray.at("origin"));
    }
    t.frames.push_back(f);
  }
  return t;
}

json to_json(const ReferenceEvent& e) {
  return {{"ref_id", e.ref_id},
          {"room_id", e.room_id},
          {"utterance_key", e.utterance_key},
          {"phrase_start_s", e.phrase_start_s},
          {"phrase_end_s", e.phrase_end_s},
          {"hold_frame", e.hold_frame},
          {"target_id", e.target_id},
          {"ref_type", to_string(e.ref_type)},
          {"tier", to_string(e.tier)}};
}

ReferenceEvent event_from_json(const json& j) {
  ReferenceEvent e;
  e.ref_id = j.at("ref_id").get<std::string>();
  e.room_id = j.at("room_id").get<std::string>();
  e.utterance_key = j.at("utterance_key").get<std::string>();
  e.phrase_start_s = j.at("phrase_start_s").get<double>();
  e.phrase_end_s = j.at("phrase_end_s").get<double>();
  e.hold_frame = j.at("hold_frame").get<long>();
  e.target_id = j.at("target_id").get<std::string>();
  e.ref_type = parse_ref_type(j.at("ref_type").get<std::string>());
  e.tier = parse_tier(j.at("tier").get<std::string>());
  return e;
}

namespace {

void write_lines(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  body(out);
  if (!out) throw Error("write failed: " + path.string());
}

// Calls `fn(json, line_no)` for every non-blank line. Parse, schema and
// per-record validation errors become ParseError carrying the line number.
void read_jsonl(const fs::path& path, const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& ex) {
      throw ParseError(path.string(), line_no, ex.what());
    }
    try {
      fn(j, line_no);
    } catch (const json::exception& ex) {
      throw ParseError(path.string(), line_no, ex.what());
    } catch (const ValidationError& ex) {
      throw ParseError(path.string(), line_no, ex.what());
    }
  }
}

void check_direction(const Vec3& d, const std::string& what) {
  if (!(d.norm() > kDegenerateNorm)) throw ValidationError(what + ": degenerate direction");
}

}  // namespace

void validate_dataset(const Dataset& dataset, const CategoryVocabulary& vocab) {
  CategoryVocabulary scratch = vocab;
  for (const auto& [room_id, scene] : dataset.scenes) {
    if (room_id != scene.room_id) {
      throw ValidationError("scene '" + scene.room_id + "' stored under key '" + room_id + "'");
    }
    if (scene.objects.size() < 2) {
      throw ValidationError("scene '" + room_id + "' has fewer than 2 objects");
    }
    std::set<std::string> ids;
    for (const auto& o : scene.objects) {
      if (!ids.insert(o.object_id).second) {
        throw ValidationError("scene '" + room_id + "': duplicate object_id '" + o.object_id + "'");
      }
      if (o.category.empty() || scratch.canonicalize(o.category).category != o.category) {
        throw ValidationError("scene '" + room_id + "', object '" + o.object_id +
                              "': category '" + o.category + "' is not canonical");
      }
      if (!o.centroid.allFinite()) {
        throw ValidationError("scene '" + room_id + "', object '" + o.object_id +
                              "': non-finite centroid");
      }
    }
  }
  for (const auto& [ref_id, track] : dataset.tracks) {
    if (ref_id != track.ref_id) {
      throw ValidationError("track '" + track.ref_id + "' stored under key '" + ref_id + "'");
    }
    if (!(track.fps > 0.0)) throw ValidationError("track '" + ref_id + "': fps must be positive");
    if (track.frames.empty()) throw ValidationError("track '" + ref_id + "': no frames");
    for (std::size_t f = 0; f < track.frames.size(); ++f) {
      for (Channel c : kAllChannels) {
        check_direction(track.frames[f][c].direction, "track '" + ref_id + "' frame " +
                                                          std::to_string(f) + " " +
                                                          std::string(to_string(c)));
      }
    }
  }
  std::set<std::string> seen;
  for (const auto& e : dataset.events) {
    const std::string who = "event '" + e.ref_id + "'";
    if (!seen.insert(e.ref_id).second) throw ValidationError(who + ": duplicate ref_id");
    auto scene = dataset.scenes.find(e.room_id);
    if (scene == dataset.scenes.end()) {
      throw ValidationError(who + ": unknown room '" + e.room_id + "'");
    }
    auto track = dataset.tracks.find(e.ref_id);
    if (track == dataset.tracks.end()) throw ValidationError(who + ": no pose track");
    if (!(e.phrase_start_s <= e.phrase_end_s)) {
      throw ValidationError(who + ": phrase_start_s > phrase_end_s");
    }
    if (!scene->second.index_of(e.target_id)) {
      throw ValidationError(who + ": target '" + e.target_id + "' not in room '" + e.room_id + "'");
    }
    if (e.hold_frame < 0 || e.hold_frame >= static_cast<long>(track->second.frames.size())) {
      throw ValidationError(who + ": hold_frame out of range");
    }
  }
}

void save_dataset(const Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);
  write_lines(dir / kScenesFile, [&](std::ostream& out) {
    for (const auto& [id, scene] : dataset.scenes) out << to_json(scene).dump() << '\n';
  });
  write_lines(dir / kTracksFile, [&](std::ostream& out) {
    for (const auto& [id, track] : dataset.tracks) out << to_json(track).dump() << '\n';
  });
  write_lines(dir / kEventsFile, [&](std::ostream& out) {
    for (const auto& e : dataset.events) out << to_json(e).dump() << '\n';
  });
}

Dataset load_dataset(const fs::path& dir, const CategoryVocabulary& vocab) {
  Dataset d;
  read_jsonl(dir / kScenesFile, [&](const json& j, std::size_t) {
    Scene s = scene_from_json(j);
    const std::string id = s.room_id;
    if (!d.scenes.emplace(id, std::move(s)).second) {
      throw ValidationError("duplicate room_id '" + id + "'");
    }
  });
  read_jsonl(dir / kTracksFile, [&](const json& j, std::size_t) {
    PoseTrack t = track_from_json(j);
    const std::string id = t.ref_id;
    if (!d.tracks.emplace(id, std::move(t)).second) {
      throw ValidationError("duplicate track ref_id '" + id + "'");
    }
  });
  std::set<std::string> seen;
  read_jsonl(dir / kEventsFile, [&](const json& j, std::size_t) {
    ReferenceEvent e = event_from_json(j);
    if (!seen.insert(e.ref_id).second) {
      throw ValidationError("duplicate ref_id '" + e.ref_id + "'");
    }
    d.events.push_back(std::move(e));
  });
  validate_dataset(d, vocab);
  return d;
}

}  // namespace poserefer
