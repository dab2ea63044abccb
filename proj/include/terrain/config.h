#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace terrain {

/// Raised for malformed documents and for parameters that violate their
/// invariants. key() names the offending parameter when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& message);

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Flat `key = value` document. `#` starts a comment; blank lines are
/// ignored. Later set() calls override earlier values.
class KeyValueDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;  // 0 for values that did not come from text
  };

  static KeyValueDocument parse(std::string_view text);
  static KeyValueDocument parse_file(const std::string& path);

  void set(const std::string& key, std::string value);
  bool contains(const std::string& key) const;
  const Entry* find(const std::string& key) const;
  const std::map<std::string, Entry>& entries() const { return entries_; }

  /// Serializes in key order, one `key = value` per line.
  std::string to_string() const;

 private:
  std::map<std::string, Entry> entries_;
};

struct CameraIntrinsics {
  double focal = 0.0;        // pixels
  double principal_u = 0.0;  // pixels
  double principal_v = 0.0;  // pixels
  double baseline = 0.0;     // meters
  double tilt_theta = 0.0;   // radians, camera pitch below horizontal
};

struct TraversabilityParams {
  double alpha_r = 0.0;     // max roughness between neighbouring normals
  double alpha_max = 0.0;   // max traversable slope
  double alpha_semi = 0.0;  // upper bound of the semi-traversable band
  double h_max = 0.0;       // max step, meters
  double min_inlier_ratio = 0.02;
  double quality_min_ratio = 0.10;
};

enum class MatcherAlgorithm { BlockBased, ACSO };

struct MatcherParams {
  MatcherAlgorithm algorithm = MatcherAlgorithm::ACSO;
  int max_disparity = 64;
  int block_radius = 2;
  int lr_consistency_tol = 1;
  double smoothness_p1 = 8.0;
  double smoothness_p2 = 32.0;
  int cost_truncation = 40;  // per-pixel absolute difference cap
};

enum class NormalMethod { CovarianceMatrix, Average3DGradient, AverageDepthChange };

struct NormalParams {
  NormalMethod method = NormalMethod::CovarianceMatrix;
  int window_radius = 5;
  /// Covariance method only: windows whose surface variation
  /// lambda_min / (lambda_0 + lambda_1 + lambda_2) exceeds this are INVALID.
  /// 1/3 (the maximum possible) disables the gate.
  double max_surface_variation = 0.2;
};

struct ReconstructionParams {
  double z_max = 0.0;  // meters; 0 disables the far-range cutoff
};

/// Everything a frame needs, validated and immutable after loading.
struct PipelineConfig {
  CameraIntrinsics camera;
  TraversabilityParams traversability;
  MatcherParams matcher;
  NormalParams normals;
  ReconstructionParams reconstruction;
  /// Rotation taking triangulation-frame vectors (X right, Y down, Z forward)
  /// into the gravity frame, where an untilted camera sees gravity as (0,0,-1).
  Eigen::Matrix3d cloud_to_gravity = default_cloud_to_gravity();

  static Eigen::Matrix3d default_cloud_to_gravity();
};

/// Every key load_config understands, in a stable order.
const std::vector<std::string>& config_keys();

/// Builds a validated bundle. With allow_unknown_keys=false any key outside
/// config_keys() is an error.
PipelineConfig load_config(const KeyValueDocument& doc, bool allow_unknown_keys = false);
PipelineConfig load_config(std::string_view text);

/// Inverse of load_config for the keys it understands.
KeyValueDocument to_document(const PipelineConfig& config);

/// Sets `key` from environment variable `prefix + KEY` (upper-cased) for every
/// known key that has one.
void apply_env_overrides(KeyValueDocument& doc, const std::string& prefix = "TERRAIN_");

void validate(const CameraIntrinsics& cam);
void validate(const TraversabilityParams& params);
void validate(const MatcherParams& params);
void validate(const NormalParams& params);
/// Checks the principal point against an image size.
void validate_for_image(const CameraIntrinsics& cam, int width, int height);

std::string to_string(MatcherAlgorithm algorithm);
std::string to_string(NormalMethod method);
MatcherAlgorithm parse_matcher_algorithm(std::string_view text);
NormalMethod parse_normal_method(std::string_view text);

}  // namespace terrain
