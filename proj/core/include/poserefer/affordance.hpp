#pragma once

#include "poserefer/types.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>

namespace poserefer {

struct KernelConfig {
  double sigma_arm_deg = 15.0;
  double sigma_head_deg = 30.0;
  double sigma_body_deg = 45.0;
  long arm_half_window_frames = 10;
  double head_body_pad_s = 0.5;

  void validate() const;
  bool operator==(const KernelConfig&) const = default;
};

nlohmann::json to_json(const KernelConfig& c);
KernelConfig kernel_config_from_json(const nlohmann::json& j);
std::string config_hash(const KernelConfig& c);

inline constexpr std::size_t kPoseFeatureDim = 6;

// Fixed component order; part of the features.jsonl contract.
struct PoseFeatures {
  std::array<double, kPoseFeatureDim> values{};

  double r_arm_max() const { return values[0]; }
  double r_arm_mean() const { return values[1]; }
  double l_arm_max() const { return values[2]; }
  double l_arm_mean() const { return values[3]; }
  double head_max() const { return values[4]; }
  double body_mean() const { return values[5]; }
};

// Angle in radians between `direction` and the ray origin -> centroid. A
// centroid coinciding with the origin yields pi. Throws std::invalid_argument
// when |direction| <= 1e-9.
double channel_angle(const Vec3& direction, const Vec3& origin, const Vec3& centroid);

// exp(-theta^2 / (2 sigma^2)); theta in radians, sigma in degrees.
double gaussian_score(double theta_rad, double sigma_deg);

enum class WindowKind { Arm, HeadBody };

struct FrameRange {
  long first = 0;
  long last = 0;  // inclusive
  long size() const { return last - first + 1; }
  bool operator==(const FrameRange&) const = default;
};

class EmptyWindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arm: hold_frame +- arm_half_window_frames. Head/body:
// [floor((start - pad) * fps), ceil((end + pad) * fps)]. Both are clamped to
// the track; an empty result throws EmptyWindowError.
FrameRange frame_window(const ReferenceEvent& event, const PoseTrack& track, WindowKind kind,
                        const KernelConfig& config = {});

PoseFeatures pose_features(const ReferenceEvent& event, const PoseTrack& track,
                           const SceneObject& object, const KernelConfig& config = {});

// |objects| x 6 matrix, rows in scene order.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, static_cast<int>(kPoseFeatureDim),
                                    Eigen::RowMajor>;

FeatureMatrix reference_features(const ReferenceEvent& event, const PoseTrack& track,
                                 const Scene& scene, const KernelConfig& config = {});

// Feature cache: ref_id -> matrix, tagged with the kernel config hash.
struct FeatureCache {
  KernelConfig config;
  std::map<std::string, FeatureMatrix> by_ref;
};

// References with an empty pooling window are left out.
FeatureCache extract_features(const Dataset& dataset, const KernelConfig& config);

// features.jsonl: header {"kernel_config": {...}, "config_hash": "..."} then
// one {"ref_id": ..., "features": [[6 numbers], ...]} per reference.
void save_feature_cache(const FeatureCache& cache, const std::filesystem::path& path);
FeatureCache load_feature_cache(const std::filesystem::path& path);

}  // namespace poserefer
