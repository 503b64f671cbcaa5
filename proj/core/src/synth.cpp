#include "poserefer/synth.hpp"

#include "poserefer/dataset_io.hpp"
#include "poserefer/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace poserefer {

using nlohmann::json;

namespace {

constexpr double kRoomX = 6.0;
constexpr double kRoomY = 6.0;
constexpr double kRoomZ = 2.5;
constexpr double kMinSeparation = 0.3;
constexpr double kMinSpeakerDistance = 1.0;
constexpr double kFps = 30.0;
constexpr long kHoldHalf = 10;
constexpr double kTrackPad = 0.7;
constexpr double kZipfExponent = 0.9;

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

double round4(double v) { return std::round(v * 1e4) / 1e4; }
Vec3 round4(const Vec3& v) { return {round4(v.x()), round4(v.y()), round4(v.z())}; }

// Unit vector deviating from `dir` by a tangent-plane Gaussian whose total
// RMS angle is sigma_deg.
Vec3 perturb(const Vec3& dir, double sigma_deg, Rng& rng) {
  const Vec3 d = dir.normalized();
  if (sigma_deg <= 0.0) return d;
  const Vec3 helper = std::abs(d.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  const Vec3 u = d.cross(helper).normalized();
  const Vec3 v = d.cross(u);
  const double s = deg2rad(sigma_deg) / std::numbers::sqrt2;
  const double a = std::clamp(rng.normal() * s, -1.4, 1.4);
  const double b = std::clamp(rng.normal() * s, -1.4, 1.4);
  return (d + std::tan(a) * u + std::tan(b) * v).normalized();
}

Vec3 random_unit(Rng& rng) {
  Vec3 v;
  do {
    v = Vec3(rng.normal(), rng.normal(), rng.normal());
  } while (v.norm() < 1e-6);
  return v.normalized();
}

std::string camel(const std::string& words) {
  std::string out;
  bool up = true;
  for (char c : words) {
    if (c == ' ') {
      up = true;
      continue;
    }
    out += up ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
    up = false;
  }
  return out;
}

const std::vector<std::string>& modifier_words() {
  static const std::vector<std::string> m = {"Red",  "Blue",  "White", "Black", "Wood",
                                             "Metal", "Glass", "Small", "Large", "Gray"};
  return m;
}

// Per-category referability, shared by every room of a dataset.
std::vector<double> category_salience(const SynthConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, "salience"));
  std::vector<double> s;
  for (std::size_t i = 0; i < synth_category_names().size(); ++i) {
    s.push_back(std::exp(cfg.category_salience_spread * rng.normal()));
  }
  return s;
}

// Largest-remainder allocation of `n` over `weights`.
std::vector<std::size_t> allocate(std::size_t n, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<std::size_t> counts(weights.size(), 0);
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(n) * weights[i] / total;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    used += counts[i];
    rem.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < n; ++k, ++used) ++counts[rem[k % rem.size()].second];
  return counts;
}

const std::vector<std::string>& exact_templates() {
  static const std::vector<std::string> t = {"the {}", "that {}", "this {}", "the {} over there", "that {} there"};
  return t;
}
const std::vector<std::string>& pronominal_templates() {
  static const std::vector<std::string> t = {"that one", "this one", "it", "that", "this one here", "that one there"};
  return t;
}
const std::vector<std::string>& partitive_templates() {
  static const std::vector<std::string> t = {"one of those", "one of these", "some of that", "part of that",
                                             "one of them"};
  return t;
}

std::string fill(const std::string& tmpl, const std::string& category) {
  std::string out = tmpl;
  const auto pos = out.find("{}");
  if (pos != std::string::npos) out.replace(pos, 2, category);
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (n_rooms < 1) throw ConfigError("n_rooms must be positive");
  if (min_objects < 2 || max_objects < min_objects) throw ConfigError("invalid objects_per_room range");
  if (!unit(pointing_fraction) || !unit(frac_exact_np) || !unit(frac_partitive) || !unit(frac_pronominal) ||
      !unit(distractor_same_category_prob) || !unit(modifier_label_prob)) {
    throw ConfigError("fractions must lie in [0, 1]");
  }
  if (std::abs(frac_exact_np + frac_partitive + frac_pronominal - 1.0) > 1e-9) {
    throw ConfigError("type_mix must sum to 1");
  }
  if (arm_noise_deg < 0.0 || head_noise_deg < 0.0 || category_salience_spread < 0.0 ||
      cluster_radius_m <= 0.0) {
    throw ConfigError("noise and spread must be non-negative, cluster radius positive");
  }
}

json to_json(const SynthConfig& c) {
  return {{"n_rooms", c.n_rooms},
          {"objects_per_room", {c.min_objects, c.max_objects}},
          {"n_refs", c.n_refs},
          {"pointing_fraction", c.pointing_fraction},
          {"type_mix", {{"exact_np", c.frac_exact_np}, {"partitive", c.frac_partitive}, {"pronominal", c.frac_pronominal}}},
          {"arm_noise_deg", c.arm_noise_deg},
          {"head_noise_deg", c.head_noise_deg},
          {"distractor_same_category_prob", c.distractor_same_category_prob},
          {"category_salience_spread", c.category_salience_spread},
          {"modifier_label_prob", c.modifier_label_prob},
          {"object_clusters", c.object_clusters},
          {"cluster_radius_m", c.cluster_radius_m},
          {"seed", c.seed}};
}

SynthConfig synth_config_from_json(const json& j) {
  SynthConfig c;
  c.n_rooms = j.value("n_rooms", c.n_rooms);
  if (j.contains("objects_per_room")) {
    const auto& r = j.at("objects_per_room");
    c.min_objects = r.at(0).get<std::size_t>();
    c.max_objects = r.at(1).get<std::size_t>();
  }
  c.n_refs = j.value("n_refs", c.n_refs);
  c.pointing_fraction = j.value("pointing_fraction", c.pointing_fraction);
  if (j.contains("type_mix")) {
    const auto& m = j.at("type_mix");
    c.frac_exact_np = m.value("exact_np", c.frac_exact_np);
    c.frac_partitive = m.value("partitive", c.frac_partitive);
    c.frac_pronominal = m.value("pronominal", c.frac_pronominal);
  }
  c.arm_noise_deg = j.value("arm_noise_deg", c.arm_noise_deg);
  c.head_noise_deg = j.value("head_noise_deg", c.head_noise_deg);
  c.distractor_same_category_prob = j.value("distractor_same_category_prob", c.distractor_same_category_prob);
  c.category_salience_spread = j.value("category_salience_spread", c.category_salience_spread);
  c.modifier_label_prob = j.value("modifier_label_prob", c.modifier_label_prob);
  c.object_clusters = j.value("object_clusters", c.object_clusters);
  c.cluster_radius_m = j.value("cluster_radius_m", c.cluster_radius_m);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

const std::vector<std::string>& synth_category_names() {
  static const std::vector<std::string> names = {
      "chair",     "table",       "book",      "cup",        "lamp",      "plant",    "box",
      "bottle",    "pillow",      "picture",   "vase",       "shelf",     "bowl",     "mug",
      "clock",     "monitor",     "keyboard",  "basket",     "cabinet",   "sofa",     "candle",
      "plate",     "tv stand",    "speaker",   "mirror",     "stool",     "desk",     "bin",
      "towel",     "teapot",      "laptop",    "phone",      "remote",    "jar",      "drawer",
      "rug",       "coffee table", "bench",    "painting",   "fan",       "kettle",   "toy",
      "helmet",    "guitar",      "globe",     "trophy",     "statue",    "lantern",  "printer",
      "umbrella"};
  return names;
}

Scene gen_scene(const SynthConfig& cfg, std::size_t room_index, Rng& rng) {
  const auto& names = synth_category_names();
  std::vector<double> zipf;
  for (std::size_t i = 0; i < names.size(); ++i) zipf.push_back(1.0 / std::pow(static_cast<double>(i + 1), kZipfExponent));

  Scene scene;
  char room[32];
  std::snprintf(room, sizeof room, "room_%02zu", room_index);
  scene.room_id = room;
  const std::size_t n = static_cast<std::size_t>(rng.between(static_cast<long>(cfg.min_objects), static_cast<long>(cfg.max_objects)));
  const Vec3 box(kRoomX, kRoomY, kRoomZ);
  std::vector<Vec3> centers;
  for (std::size_t k = 0; k < cfg.object_clusters; ++k) {
    Vec3 c;
    for (int a = 0; a < 3; ++a) c[a] = rng.uniform(0.0, box[a]);
    centers.push_back(c);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 p;
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      if (centers.empty()) {
        for (int a = 0; a < 3; ++a) p[a] = rng.uniform(0.0, box[a]);
      } else {
        const Vec3& c = centers[rng.below(centers.size())];
        for (int a = 0; a < 3; ++a) p[a] = std::clamp(c[a] + cfg.cluster_radius_m * rng.normal(), 0.0, box[a]);
      }
      p = round4(p);
      placed = std::all_of(scene.objects.begin(), scene.objects.end(),
                           [&](const SceneObject& o) { return (o.centroid - p).norm() >= kMinSeparation; });
    }
    if (!placed) throw Error("gen_scene: object placement failed in " + scene.room_id);
    const std::string& category = names[rng.weighted(zipf)];
    std::string raw = camel(category);
    if (rng.bernoulli(cfg.modifier_label_prob)) {
      const auto& mods = modifier_words();
      raw = mods[rng.below(mods.size())] + raw;
    }
    char id[32];
    std::snprintf(id, sizeof id, "obj_%03zu", i);
    scene.objects.push_back({id, p, raw, category});
  }
  return scene;
}

namespace {

std::size_t pick_target(const SynthConfig& cfg, const Scene& scene, const std::vector<double>& salience, Rng& rng) {
  const auto& names = synth_category_names();
  std::map<std::string, std::size_t> count;
  for (const auto& o : scene.objects) ++count[o.category];
  std::vector<double> dup_w(scene.objects.size(), 0.0);
  std::vector<double> uniq_w(scene.objects.size(), 0.0);
  double dup_total = 0.0;
  double uniq_total = 0.0;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& cat = scene.objects[i].category;
    const auto it = std::find(names.begin(), names.end(), cat);
    const double w = it == names.end() ? 1.0 : salience[static_cast<std::size_t>(it - names.begin())];
    if (count[cat] > 1) {
      dup_w[i] = w;
      dup_total += w;
    } else {
      uniq_w[i] = w;
      uniq_total += w;
    }
  }
  const bool want_dup = rng.bernoulli(cfg.distractor_same_category_prob);
  if ((want_dup && dup_total > 0.0) || uniq_total == 0.0) return rng.weighted(dup_w);
  return rng.weighted(uniq_w);
}

struct ReferenceSpec {
  Regime regime;
  Tier tier;
  RefType type;
};

GeneratedReference generate(const SynthConfig& cfg, const Scene& scene, const ReferenceSpec& spec,
                            std::size_t target, const std::string& ref_id, Rng& rng) {
  const Vec3 goal = scene.objects[target].centroid;
  Vec3 feet;
  for (int attempt = 0;; ++attempt) {
    feet = Vec3(rng.uniform(0.3, kRoomX - 0.3), rng.uniform(0.3, kRoomY - 0.3), 0.0);
    const Vec3 chest(feet.x(), feet.y(), 1.3);
    if ((goal - chest).norm() >= kMinSpeakerDistance + 0.5) break;
    if (attempt > 10000) throw Error("gen_reference: cannot place speaker for " + ref_id);
  }
  const Vec3 body_origin = round4(Vec3(feet.x(), feet.y(), 1.0));
  const Vec3 head_origin = round4(Vec3(feet.x(), feet.y(), 1.65));
  Vec3 facing = goal - body_origin;
  facing.z() = 0.0;
  if (facing.norm() < 1e-6) facing = Vec3::UnitX();
  facing.normalize();
  const Vec3 side = facing.cross(Vec3::UnitZ()).normalized();
  const Vec3 r_origin = round4(Vec3(feet.x(), feet.y(), 1.4) + 0.2 * side);
  const Vec3 l_origin = round4(Vec3(feet.x(), feet.y(), 1.4) - 0.2 * side);

  const bool pointing = spec.regime == Regime::Pointing;
  const double tier_arm_scale = spec.tier == Tier::T2 ? 1.5 : 1.0;
  const double arm_sigma = cfg.arm_noise_deg * tier_arm_scale;
  const double jitter = 0.25 * arm_sigma;
  double head_sigma = cfg.head_noise_deg;
  if (spec.tier == Tier::T3) head_sigma *= 1.5;
  if (spec.tier == Tier::T4) head_sigma *= 2.0;
  const double body_sigma = pointing ? 1.5 * cfg.head_noise_deg : 2.5 * cfg.head_noise_deg;

  const bool right_points = pointing;
  const bool left_points = pointing && spec.tier == Tier::T5;
  const Vec3 r_aim = right_points ? perturb(goal - r_origin, arm_sigma, rng) : random_unit(rng);
  const Vec3 l_aim = left_points ? perturb(goal - l_origin, arm_sigma, rng) : random_unit(rng);
  const Vec3 head_aim = perturb(goal - head_origin, head_sigma, rng);
  Vec3 body_aim = perturb(facing, body_sigma, rng);
  body_aim.z() = 0.0;
  if (body_aim.norm() < 1e-6) body_aim = facing;
  body_aim.normalize();

  const double start = kTrackPad + rng.uniform(0.0, 0.3);
  const double end = start + rng.uniform(1.0, 3.0);
  const long frames = static_cast<long>(std::ceil((end + kTrackPad) * kFps)) + 1;
  const long hold = std::lround(0.5 * (start + end) * kFps);

  GeneratedReference out;
  out.track.ref_id = ref_id;
  out.track.fps = kFps;
  out.track.frames.reserve(static_cast<std::size_t>(frames));
  const Vec3 rest = Vec3(0.0, 0.0, -1.0);
  for (long f = 0; f < frames; ++f) {
    const bool in_hold = f >= hold - kHoldHalf && f <= hold + kHoldHalf;
    PoseFrame frame;
    auto arm = [&](const Vec3& aim, bool points) {
      // Pointing arms hold the aim only during the hold; other arms keep their
      // random direction throughout.
      if (points && !in_hold) return perturb(rest, 20.0, rng);
      return perturb(aim, points ? jitter : 3.0, rng);
    };
    frame[Channel::RightArm] = {round4(arm(r_aim, right_points)), r_origin};
    frame[Channel::LeftArm] = {round4(arm(l_aim, left_points)), l_origin};
    frame[Channel::Head] = {round4(perturb(head_aim, 3.0, rng)), head_origin};
    Vec3 b = perturb(body_aim, 2.0, rng);
    b.z() = 0.0;
    frame[Channel::Body] = {round4(b.normalized()), body_origin};
    out.track.frames.push_back(frame);
  }

  const auto& category = scene.objects[target].category;
  switch (spec.type) {
    case RefType::ExactNp: {
      const auto& t = exact_templates();
      out.utterance_key = fill(t[rng.below(t.size())], category);
      out.utterance_group = category;
      break;
    }
    case RefType::Pronominal: {
      const auto& t = pronominal_templates();
      out.utterance_key = t[rng.below(t.size())];
      break;
    }
    case RefType::Partitive: {
      const auto& t = partitive_templates();
      out.utterance_key = t[rng.below(t.size())];
      break;
    }
  }

  ReferenceEvent& e = out.event;
  e.ref_id = ref_id;
  e.room_id = scene.room_id;
  e.utterance_key = out.utterance_key;
  e.phrase_start_s = round4(start);
  e.phrase_end_s = round4(end);
  e.hold_frame = hold;
  e.target_id = scene.objects[target].object_id;
  e.ref_type = spec.type;
  e.tier = spec.tier;
  return out;
}

Tier pick_tier(Regime regime, Rng& rng) {
  if (regime == Regime::Pointing) {
    static const std::vector<double> w = {1344, 558, 166};
    static const Tier t[] = {Tier::T1, Tier::T2, Tier::T5};
    return t[rng.weighted(w)];
  }
  static const std::vector<double> w = {153, 1543};
  static const Tier t[] = {Tier::T3, Tier::T4};
  return t[rng.weighted(w)];
}

}  // namespace

GeneratedReference gen_reference(const SynthConfig& cfg, const Scene& scene, Regime regime, RefType ref_type,
                                 const std::string& ref_id, Rng& rng) {
  if (scene.objects.size() < 2) throw std::invalid_argument("gen_reference: scene needs at least 2 objects");
  const std::size_t target = pick_target(cfg, scene, category_salience(cfg), rng);
  const ReferenceSpec spec{regime, pick_tier(regime, rng), ref_type};
  return generate(cfg, scene, spec, target, ref_id, rng);
}

json to_json(const KeyManifest& m) {
  return {{"utterance_keys", m.utterance_keys}, {"category_keys", m.category_keys}, {"group_map", m.group_map}};
}

KeyManifest key_manifest_from_json(const json& j) {
  KeyManifest m;
  m.utterance_keys = j.at("utterance_keys").get<std::vector<std::string>>();
  m.category_keys = j.at("category_keys").get<std::vector<std::string>>();
  m.group_map = j.at("group_map").get<std::map<std::string, std::string>>();
  return m;
}

SynthOutput gen_dataset(const SynthConfig& cfg) {
  cfg.validate();
  SynthOutput out;
  Rng scene_rng(derive_seed(cfg.seed, "scenes"));
  std::vector<std::string> rooms;
  for (std::size_t r = 0; r < cfg.n_rooms; ++r) {
    Scene s = gen_scene(cfg, r, scene_rng);
    rooms.push_back(s.room_id);
    out.dataset.scenes.emplace(s.room_id, std::move(s));
  }

  Rng plan_rng(derive_seed(cfg.seed, "plan"));
  const auto regime_counts = allocate(cfg.n_refs, {cfg.pointing_fraction, 1.0 - cfg.pointing_fraction});
  const auto type_counts = allocate(cfg.n_refs, {cfg.frac_exact_np, cfg.frac_pronominal, cfg.frac_partitive});
  const auto point_tiers = allocate(regime_counts[0], {1344, 558, 166});
  const auto other_tiers = allocate(regime_counts[1], {153, 1543});
  std::vector<std::pair<Regime, Tier>> tiers;
  const Tier pt[] = {Tier::T1, Tier::T2, Tier::T5};
  const Tier nt[] = {Tier::T3, Tier::T4};
  for (std::size_t i = 0; i < 3; ++i) tiers.insert(tiers.end(), point_tiers[i], {Regime::Pointing, pt[i]});
  for (std::size_t i = 0; i < 2; ++i) tiers.insert(tiers.end(), other_tiers[i], {Regime::NonPointing, nt[i]});
  std::vector<RefType> types;
  const RefType tt[] = {RefType::ExactNp, RefType::Pronominal, RefType::Partitive};
  for (std::size_t i = 0; i < 3; ++i) types.insert(types.end(), type_counts[i], tt[i]);
  plan_rng.shuffle(tiers);
  plan_rng.shuffle(types);

  const std::vector<double> salience = category_salience(cfg);
  Rng ref_rng(derive_seed(cfg.seed, "references"));
  std::set<std::string> utterances;
  for (std::size_t i = 0; i < cfg.n_refs; ++i) {
    const Scene& scene = out.dataset.scenes.at(rooms[i % rooms.size()]);
    char id[32];
    std::snprintf(id, sizeof id, "ref_%05zu", i);
    const std::size_t target = pick_target(cfg, scene, salience, ref_rng);
    GeneratedReference g = generate(cfg, scene, {tiers[i].first, tiers[i].second, types[i]}, target, id, ref_rng);
    utterances.insert(g.utterance_key);
    if (g.utterance_group) out.manifest.group_map[g.utterance_key] = *g.utterance_group;
    out.dataset.tracks.emplace(id, std::move(g.track));
    out.dataset.events.push_back(std::move(g.event));
  }
  out.manifest.utterance_keys.assign(utterances.begin(), utterances.end());
  out.manifest.category_keys = synth_category_names();
  std::sort(out.manifest.category_keys.begin(), out.manifest.category_keys.end());
  return out;
}

void save_synth_output(const SynthOutput& out, const std::filesystem::path& dir) {
  save_dataset(out.dataset, dir);
  std::ofstream f(dir / "manifest.json");
  if (!f) throw Error("cannot write " + (dir / "manifest.json").string());
  f << to_json(out.manifest).dump(2) << '\n';
}

KeyManifest load_key_manifest(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path.string());
  try {
    return key_manifest_from_json(json::parse(f));
  } catch (const json::exception& e) {
    throw ParseError(path.string(), 1, e.what());
  }
}

PseudoEmbedderConfig pseudo_config_for(const KeyManifest& m, std::uint64_t seed, std::size_t dim,
                                       double within_group_noise) {
  PseudoEmbedderConfig c;
  c.seed = seed;
  c.dim = dim;
  c.within_group_noise = within_group_noise;
  c.group_map = m.group_map;
  for (const auto& k : m.category_keys) c.group_map[k] = k;
  return c;
}

}  // namespace poserefer
