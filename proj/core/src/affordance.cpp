#include "poserefer/affordance.hpp"

#include "poserefer/error.hpp"
#include "poserefer/hashing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace poserefer {

using nlohmann::json;

void KernelConfig::validate() const {
  if (!(sigma_arm_deg > 0 && sigma_head_deg > 0 && sigma_body_deg > 0)) {
    throw ConfigError("kernel sigmas must be positive");
  }
  if (arm_half_window_frames < 0 || !(head_body_pad_s >= 0)) {
    throw ConfigError("kernel window sizes must be non-negative");
  }
}

json to_json(const KernelConfig& c) {
  return {{"sigma_arm_deg", c.sigma_arm_deg},
          {"sigma_head_deg", c.sigma_head_deg},
          {"sigma_body_deg", c.sigma_body_deg},
          {"arm_half_window_frames", c.arm_half_window_frames},
          {"head_body_pad_s", c.head_body_pad_s}};
}

KernelConfig kernel_config_from_json(const json& j) {
  KernelConfig c;
  c.sigma_arm_deg = j.value("sigma_arm_deg", c.sigma_arm_deg);
  c.sigma_head_deg = j.value("sigma_head_deg", c.sigma_head_deg);
  c.sigma_body_deg = j.value("sigma_body_deg", c.sigma_body_deg);
  c.arm_half_window_frames = j.value("arm_half_window_frames", c.arm_half_window_frames);
  c.head_body_pad_s = j.value("head_body_pad_s", c.head_body_pad_s);
  c.validate();
  return c;
}

std::string config_hash(const KernelConfig& c) { return content_hash(to_json(c).dump()); }

double channel_angle(const Vec3& direction, const Vec3& origin, const Vec3& centroid) {
  const double dn = direction.norm();
  if (!(dn > kDegenerateNorm)) throw std::invalid_argument("channel_angle: degenerate direction");
  const Vec3 offset = centroid - origin;
  const double on = offset.norm();
  if (on < kDegenerateNorm) return std::numbers::pi;
  const double cosine = std::clamp(direction.dot(offset) / (dn * on), -1.0, 1.0);
  return std::acos(cosine);
}

double gaussian_score(double theta_rad, double sigma_deg) {
  const double sigma = sigma_deg * std::numbers::pi / 180.0;
  return std::exp(-(theta_rad * theta_rad) / (2.0 * sigma * sigma));
}

namespace {

// Fractional frame positions within 1e-9 of an integer are treated as that
// integer, so 1.6 s * 30 fps does not ceil to 49.
double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) < 1e-9 ? r : x;
}

struct Pooled {
  double max = 0.0;
  double mean = 0.0;
};

Pooled pool_channel(const PoseTrack& track, FrameRange range, Channel channel,
                    const Vec3& centroid, double sigma_deg) {
  Pooled p;
  double sum = 0.0;
  for (long f = range.first; f <= range.last; ++f) {
    const ChannelRay& ray = track.frames[static_cast<std::size_t>(f)][channel];
    const double s = gaussian_score(channel_angle(ray.direction, ray.origin, centroid), sigma_deg);
    p.max = std::max(p.max, s);
    sum += s;
  }
  p.mean = sum / static_cast<double>(range.size());
  return p;
}

PoseFeatures features_in_windows(const PoseTrack& track, FrameRange arm, FrameRange head_body,
                                 const Vec3& centroid, const KernelConfig& config) {
  const Pooled r = pool_channel(track, arm, Channel::RightArm, centroid, config.sigma_arm_deg);
  const Pooled l = pool_channel(track, arm, Channel::LeftArm, centroid, config.sigma_arm_deg);
  const Pooled h = pool_channel(track, head_body, Channel::Head, centroid, config.sigma_head_deg);
  const Pooled b = pool_channel(track, head_body, Channel::Body, centroid, config.sigma_body_deg);
  return PoseFeatures{{r.max, r.mean, l.max, l.mean, h.max, b.mean}};
}

}  // namespace

FrameRange frame_window(const ReferenceEvent& event, const PoseTrack& track, WindowKind kind,
                        const KernelConfig& config) {
  const long n = static_cast<long>(track.frames.size());
  long first = 0;
  long last = 0;
  if (kind == WindowKind::Arm) {
    first = event.hold_frame - config.arm_half_window_frames;
    last = event.hold_frame + config.arm_half_window_frames;
  } else {
    first = static_cast<long>(
        std::floor(snap((event.phrase_start_s - config.head_body_pad_s) * track.fps)));
    last = static_cast<long>(
        std::ceil(snap((event.phrase_end_s + config.head_body_pad_s) * track.fps)));
  }
  first = std::max(first, 0L);
  last = std::min(last, n - 1);
  if (first > last) {
    throw EmptyWindowError("empty window for '" + event.ref_id + "' (" +
                           (kind == WindowKind::Arm ? "arm" : "head/body") + ")");
  }
  return {first, last};
}

PoseFeatures pose_features(const ReferenceEvent& event, const PoseTrack& track,
                           const SceneObject& object, const KernelConfig& config) {
  const FrameRange arm = frame_window(event, track, WindowKind::Arm, config);
  const FrameRange head_body = frame_window(event, track, WindowKind::HeadBody, config);
  return features_in_windows(track, arm, head_body, object.centroid, config);
}

FeatureMatrix reference_features(const ReferenceEvent& event, const PoseTrack& track,
                                 const Scene& scene, const KernelConfig& config) {
  const FrameRange arm = frame_window(event, track, WindowKind::Arm, config);
  const FrameRange head_body = frame_window(event, track, WindowKind::HeadBody, config);
  FeatureMatrix m(static_cast<Eigen::Index>(scene.objects.size()), static_cast<Eigen::Index>(kPoseFeatureDim));
  for (std::size_t n = 0; n < scene.objects.size(); ++n) {
    const PoseFeatures f =
        features_in_windows(track, arm, head_body, scene.objects[n].centroid, config);
    for (std::size_t k = 0; k < kPoseFeatureDim; ++k) {
      m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) = f.values[k];
    }
  }
  return m;
}

FeatureCache extract_features(const Dataset& dataset, const KernelConfig& config) {
  config.validate();
  FeatureCache cache{config, {}};
  for (const auto& e : dataset.events) {
    try {
      cache.by_ref.emplace(e.ref_id, reference_features(e, dataset.track_for(e),
                                                        dataset.scene_for(e), config));
    } catch (const EmptyWindowError&) {
      // Rejected later by filter_references.
    }
  }
  return cache;
}

void save_feature_cache(const FeatureCache& cache, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << json{{"kernel_config", to_json(cache.config)}, {"config_hash", config_hash(cache.config)}}
             .dump()
      << '\n';
  for (const auto& [ref_id, m] : cache.by_ref) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    out << json{{"ref_id", ref_id}, {"features", std::move(rows)}}.dump() << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

FeatureCache load_feature_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  FeatureCache cache;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        cache.config = kernel_config_from_json(j.at("kernel_config"));
        if (j.at("config_hash").get<std::string>() != config_hash(cache.config)) {
          throw ParseError(path.string(), line_no, "kernel config hash does not match header");
        }
        have_header = true;
        continue;
      }
      const auto& rows = j.at("features");
      FeatureMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kPoseFeatureDim));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != kPoseFeatureDim) {
          throw ParseError(path.string(), line_no, "feature rows must have 6 entries");
        }
        for (std::size_t c = 0; c < kPoseFeatureDim; ++c) {
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
        }
      }
      const std::string ref_id = j.at("ref_id").get<std::string>();
      if (!cache.by_ref.emplace(ref_id, std::move(m)).second) {
        throw ParseError(path.string(), line_no, "duplicate ref_id '" + ref_id + "'");
      }
    } catch (const json::exception& ex) {
      throw ParseError(path.string(), line_no, ex.what());
    }
  }
  if (!have_header) throw ParseError(path.string(), line_no, "missing header line");
  return cache;
}

}  // namespace poserefer
