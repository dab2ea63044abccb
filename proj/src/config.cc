#include "terrain/config.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/LU>
#include <fmt/format.h>

namespace terrain {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

class Reader {
 public:
  Reader(const KeyValueDocument& doc, bool allow_unknown) : doc_(doc) {
    if (allow_unknown) return;
    const auto& known = config_keys();
    for (const auto& [key, entry] : doc.entries()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ConfigError(key, entry.line, "unknown key");
      }
    }
  }

  bool has(const std::string& key) const { return doc_.contains(key); }

  std::string_view raw(const std::string& key) const {
    const auto* entry = doc_.find(key);
    if (entry == nullptr) throw ConfigError(key, 0, "required key is missing");
    return entry->value;
  }

  int line(const std::string& key) const {
    const auto* entry = doc_.find(key);
    return entry == nullptr ? 0 : entry->line;
  }

  double number(const std::string& key) const {
    std::string_view text = trim(raw(key));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
      throw ConfigError(key, line(key), fmt::format("expected a number, got '{}'", text));
    }
    return value;
  }

  double number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  /// Radians, or degrees with a trailing "deg".
  double angle(const std::string& key) const {
    std::string_view text = trim(raw(key));
    double scale = 1.0;
    if (text.size() > 3 && text.substr(text.size() - 3) == "deg") {
      text = trim(text.substr(0, text.size() - 3));
      scale = std::numbers::pi / 180.0;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
      throw ConfigError(key, line(key), fmt::format("expected an angle, got '{}'", raw(key)));
    }
    return value * scale;
  }

  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    std::string_view text = trim(raw(key));
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ConfigError(key, line(key), fmt::format("expected an integer, got '{}'", text));
    }
    return value;
  }

  std::vector<double> numbers(const std::string& key) const {
    std::istringstream in{std::string(raw(key))};
    std::vector<double> out;
    std::string token;
    while (in >> token) {
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ConfigError(key, line(key), fmt::format("expected numbers, got '{}'", token));
      }
      out.push_back(value);
    }
    return out;
  }

 private:
  const KeyValueDocument& doc_;
};

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(key, 0, what);
}

constexpr double kHalfPi = std::numbers::pi / 2.0;

std::string describe(const std::string& key, int line, const std::string& message) {
  std::string where = line > 0 ? fmt::format("config line {}", line) : std::string("config");
  if (!key.empty()) where += fmt::format(": '{}'", key);
  return fmt::format("{}: {}", where, message);
}

}  // namespace

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::runtime_error(describe(key, line, message)), key_(std::move(key)), line_(line) {}

KeyValueDocument KeyValueDocument::parse(std::string_view text) {
  KeyValueDocument doc;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", line_no, "expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("", line_no, "empty key");
    if (doc.contains(key)) throw ConfigError(key, line_no, "duplicate key");
    doc.entries_[key] = Entry{std::move(value), line_no};
  }
  return doc;
}

KeyValueDocument KeyValueDocument::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", 0, fmt::format("cannot open '{}'", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

void KeyValueDocument::set(const std::string& key, std::string value) {
  entries_[key] = Entry{std::move(value), 0};
}

bool KeyValueDocument::contains(const std::string& key) const { return entries_.count(key) > 0; }

const KeyValueDocument::Entry* KeyValueDocument::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string KeyValueDocument::to_string() const {
  std::string out;
  for (const auto& [key, entry] : entries_) out += fmt::format("{} = {}\n", key, entry.value);
  return out;
}

Eigen::Matrix3d PipelineConfig::default_cloud_to_gravity() {
  // X right stays right, Y down maps to gravity (0,0,-1), Z forward maps to (0,1,0).
  Eigen::Matrix3d r;
  r << 1, 0, 0,
       0, 0, 1,
       0, -1, 0;
  return r;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "focal", "principal_u", "principal_v", "baseline", "tilt_theta", "frame_rotation",
      "z_max",
      "alpha_r", "alpha_max", "alpha_semi", "h_max", "min_inlier_ratio", "quality_min_ratio",
      "matcher", "max_disparity", "block_radius", "lr_consistency_tol", "smoothness_p1",
      "smoothness_p2", "cost_truncation",
      "normal_method", "normal_window_radius", "max_surface_variation",
  };
  return keys;
}

void validate(const CameraIntrinsics& cam) {
  require(cam.focal > 0.0, "focal", "must be > 0");
  require(cam.baseline > 0.0, "baseline", "must be > 0");
  require(std::abs(cam.tilt_theta) < kHalfPi, "tilt_theta", "must satisfy |tilt_theta| < pi/2");
  require(cam.principal_u >= 0.0, "principal_u", "must be >= 0");
  require(cam.principal_v >= 0.0, "principal_v", "must be >= 0");
}

void validate_for_image(const CameraIntrinsics& cam, int width, int height) {
  require(cam.principal_u >= 0.0 && cam.principal_u < width, "principal_u",
          "must lie inside the image width");
  require(cam.principal_v >= 0.0 && cam.principal_v < height, "principal_v",
          "must lie inside the image height");
}

void validate(const TraversabilityParams& p) {
  require(p.alpha_r > 0.0 && p.alpha_r < kHalfPi, "alpha_r", "must satisfy 0 < alpha_r < pi/2");
  require(p.alpha_max > 0.0 && p.alpha_max < kHalfPi, "alpha_max",
          "must satisfy 0 < alpha_max < pi/2");
  require(p.alpha_semi > p.alpha_max && p.alpha_semi < kHalfPi, "alpha_semi",
          "must satisfy alpha_max < alpha_semi < pi/2");
  require(p.h_max > 0.0, "h_max", "must be > 0");
  require(p.min_inlier_ratio > 0.0 && p.min_inlier_ratio < 1.0, "min_inlier_ratio",
          "must satisfy 0 < min_inlier_ratio < 1");
  require(p.quality_min_ratio >= 0.0 && p.quality_min_ratio < 1.0, "quality_min_ratio",
          "must satisfy 0 <= quality_min_ratio < 1");
}

void validate(const MatcherParams& p) {
  require(p.max_disparity >= 1, "max_disparity", "must be >= 1");
  require(p.block_radius >= 1, "block_radius", "must be >= 1");
  require(p.lr_consistency_tol >= 0, "lr_consistency_tol", "must be >= 0");
  require(p.smoothness_p1 > 0.0, "smoothness_p1", "must be > 0");
  require(p.smoothness_p2 >= p.smoothness_p1, "smoothness_p2", "must be >= smoothness_p1");
  require(p.cost_truncation >= 1 && p.cost_truncation <= 255, "cost_truncation",
          "must lie in [1, 255]");
}

void validate(const NormalParams& p) {
  require(p.window_radius >= 1, "normal_window_radius", "must be >= 1");
  require(p.max_surface_variation > 0.0 && p.max_surface_variation <= 1.0 / 3.0 + 1e-12,
          "max_surface_variation", "must lie in (0, 1/3]");
}

std::string to_string(MatcherAlgorithm algorithm) {
  return algorithm == MatcherAlgorithm::BlockBased ? "bb" : "acso";
}

std::string to_string(NormalMethod method) {
  switch (method) {
    case NormalMethod::CovarianceMatrix: return "covariance";
    case NormalMethod::Average3DGradient: return "gradient";
    case NormalMethod::AverageDepthChange: return "depth_change";
  }
  return "covariance";
}

MatcherAlgorithm parse_matcher_algorithm(std::string_view text) {
  text = trim(text);
  if (text == "bb") return MatcherAlgorithm::BlockBased;
  if (text == "acso") return MatcherAlgorithm::ACSO;
  throw ConfigError("matcher", 0, fmt::format("expected 'bb' or 'acso', got '{}'", text));
}

NormalMethod parse_normal_method(std::string_view text) {
  text = trim(text);
  if (text == "covariance") return NormalMethod::CovarianceMatrix;
  if (text == "gradient") return NormalMethod::Average3DGradient;
  if (text == "depth_change") return NormalMethod::AverageDepthChange;
  throw ConfigError("normal_method", 0,
                    fmt::format("expected covariance, gradient or depth_change, got '{}'", text));
}

PipelineConfig load_config(const KeyValueDocument& doc, bool allow_unknown_keys) {
  Reader in(doc, allow_unknown_keys);
  PipelineConfig config;

  auto& cam = config.camera;
  cam.focal = in.number("focal");
  cam.principal_u = in.number("principal_u");
  cam.principal_v = in.number("principal_v");
  cam.baseline = in.number("baseline");
  cam.tilt_theta = in.has("tilt_theta") ? in.angle("tilt_theta") : 0.0;
  validate(cam);

  if (in.has("frame_rotation")) {
    const auto values = in.numbers("frame_rotation");
    if (values.size() != 9) {
      throw ConfigError("frame_rotation", in.line("frame_rotation"),
                        "expected 9 numbers (row-major 3x3 rotation)");
    }
    Eigen::Matrix3d r;
    for (int i = 0; i < 9; ++i) r(i / 3, i % 3) = values[static_cast<std::size_t>(i)];
    const double orthogonality = (r * r.transpose() - Eigen::Matrix3d::Identity()).norm();
    if (orthogonality > 1e-6 || std::abs(r.determinant() - 1.0) > 1e-6) {
      throw ConfigError("frame_rotation", in.line("frame_rotation"), "must be a proper rotation");
    }
    config.cloud_to_gravity = r;
  }

  config.reconstruction.z_max = in.number("z_max", 0.0);
  require(config.reconstruction.z_max >= 0.0, "z_max", "must be >= 0");

  auto& trav = config.traversability;
  trav.alpha_r = in.angle("alpha_r");
  trav.alpha_max = in.angle("alpha_max");
  trav.alpha_semi = in.has("alpha_semi") ? in.angle("alpha_semi") : 1.5 * trav.alpha_max;
  trav.h_max = in.number("h_max");
  trav.min_inlier_ratio = in.number("min_inlier_ratio", trav.min_inlier_ratio);
  trav.quality_min_ratio = in.number("quality_min_ratio", trav.quality_min_ratio);
  validate(trav);

  auto& matcher = config.matcher;
  if (in.has("matcher")) matcher.algorithm = parse_matcher_algorithm(in.raw("matcher"));
  matcher.max_disparity = in.integer("max_disparity", matcher.max_disparity);
  matcher.block_radius = in.integer("block_radius", matcher.block_radius);
  matcher.lr_consistency_tol = in.integer("lr_consistency_tol", matcher.lr_consistency_tol);
  matcher.smoothness_p1 = in.number("smoothness_p1", matcher.smoothness_p1);
  matcher.smoothness_p2 = in.number("smoothness_p2", matcher.smoothness_p2);
  matcher.cost_truncation = in.integer("cost_truncation", matcher.cost_truncation);
  validate(matcher);

  auto& normals = config.normals;
  if (in.has("normal_method")) normals.method = parse_normal_method(in.raw("normal_method"));
  normals.window_radius = in.integer("normal_window_radius", normals.window_radius);
  normals.max_surface_variation = in.number("max_surface_variation", normals.max_surface_variation);
  validate(normals);

  return config;
}

PipelineConfig load_config(std::string_view text) {
  return load_config(KeyValueDocument::parse(text));
}

KeyValueDocument to_document(const PipelineConfig& config) {
  KeyValueDocument doc;
  doc.set("focal", format_double(config.camera.focal));
  doc.set("principal_u", format_double(config.camera.principal_u));
  doc.set("principal_v", format_double(config.camera.principal_v));
  doc.set("baseline", format_double(config.camera.baseline));
  doc.set("tilt_theta", format_double(config.camera.tilt_theta));
  std::string rotation;
  for (int i = 0; i < 9; ++i) {
    if (i > 0) rotation += ' ';
    rotation += format_double(config.cloud_to_gravity(i / 3, i % 3));
  }
  doc.set("frame_rotation", rotation);
  doc.set("z_max", format_double(config.reconstruction.z_max));
  doc.set("alpha_r", format_double(config.traversability.alpha_r));
  doc.set("alpha_max", format_double(config.traversability.alpha_max));
  doc.set("alpha_semi", format_double(config.traversability.alpha_semi));
  doc.set("h_max", format_double(config.traversability.h_max));
  doc.set("min_inlier_ratio", format_double(config.traversability.min_inlier_ratio));
  doc.set("quality_min_ratio", format_double(config.traversability.quality_min_ratio));
  doc.set("matcher", to_string(config.matcher.algorithm));
  doc.set("max_disparity", std::to_string(config.matcher.max_disparity));
  doc.set("block_radius", std::to_string(config.matcher.block_radius));
  doc.set("lr_consistency_tol", std::to_string(config.matcher.lr_consistency_tol));
  doc.set("smoothness_p1", format_double(config.matcher.smoothness_p1));
  doc.set("smoothness_p2", format_double(config.matcher.smoothness_p2));
  doc.set("cost_truncation", std::to_string(config.matcher.cost_truncation));
  doc.set("normal_method", to_string(config.normals.method));
  doc.set("normal_window_radius", std::to_string(config.normals.window_radius));
  doc.set("max_surface_variation", format_double(config.normals.max_surface_variation));
  return doc;
}

void apply_env_overrides(KeyValueDocument& doc, const std::string& prefix) {
  for (const auto& key : config_keys()) {
    std::string name = prefix + key;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (const char* value = std::getenv(name.c_str())) doc.set(key, value);
  }
}

}  // namespace terrain
