#include "terrain/synthetic.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "terrain/segmentation.h"

namespace terrain {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTextureCell = 2.0;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform texel in [0, 255] at integer lattice (i, v).
double texel(std::uint64_t seed, long i, long v) {
  const std::uint64_t h = mix(mix(seed) ^ mix(static_cast<std::uint64_t>(i) * 0x100000001b3ULL) ^
                              mix(static_cast<std::uint64_t>(v) ^ 0x5bd1e995ULL));
  return static_cast<double>(h & 0xff);
}

/// Value noise: texels on a lattice of kTextureCell pixels, bilinear in between.
double texture(std::uint64_t seed, double u, int v) {
  const double x = u / kTextureCell;
  const double y = v / kTextureCell;
  const double x0 = std::floor(x);
  const double y0 = std::floor(y);
  const double fx = x - x0;
  const double fy = y - y0;
  const long i = static_cast<long>(x0);
  const long j = static_cast<long>(y0);
  const double top = texel(seed, i, j) * (1.0 - fx) + texel(seed, i + 1, j) * fx;
  const double bottom = texel(seed, i, j + 1) * (1.0 - fx) + texel(seed, i + 1, j + 1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

std::uint8_t to_gray(double value) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
}

Eigen::Vector3d pixel_ray(const CameraIntrinsics& cam, double u, double v) {
  return {(u - cam.principal_u) / cam.focal, (v - cam.principal_v) / cam.focal, 1.0};
}

/// Membership test on a real-valued column; rectangle sides on the image
/// border extend to infinity.
bool footprint_contains(const ScenePatch& patch, int width, double u, int v) {
  for (const auto& r : patch.footprint) {
    if (v < r.v0 || v >= r.v1) continue;
    const double lo = r.u0 == 0 ? -kInf : r.u0 - 0.5;
    const double hi = r.u1 == width ? kInf : r.u1 - 0.5;
    if (u >= lo && u < hi) return true;
  }
  return false;
}

/// Ray parameter where origin + t * dir meets the patch plane; NaN if parallel.
double intersect(const ScenePatch& patch, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) {
  const double denom = patch.normal.dot(dir);
  if (denom == 0.0) return kNaN;
  return -(patch.normal.dot(origin) + patch.offset) / denom;
}

void check_scene(const SceneSpec& scene) {
  if (scene.width <= 0 || scene.height <= 0) {
    throw std::invalid_argument("scene: image size must be positive");
  }
  validate(scene.camera);
  for (std::size_t p = 0; p < scene.patches.size(); ++p) {
    const auto& patch = scene.patches[p];
    if (!(patch.normal.norm() > 0.0) || !patch.normal.allFinite() || !std::isfinite(patch.offset)) {
      throw std::invalid_argument(fmt::format("scene: patch {} has an invalid plane", p));
    }
    for (const auto& r : patch.footprint) {
      if (r.u0 < 0 || r.v0 < 0 || r.u1 > scene.width || r.v1 > scene.height || r.u0 >= r.u1 ||
          r.v0 >= r.v1) {
        throw std::invalid_argument(
            fmt::format("scene: patch {} rectangle {} {} {} {} is empty or outside the image", p,
                        r.u0, r.v0, r.u1, r.v1));
      }
    }
  }
}

Grid<int> owner_map(const SceneSpec& scene) {
  Grid<int> owner(scene.width, scene.height, kUnlabeled);
  for (std::size_t p = 0; p < scene.patches.size(); ++p) {
    for (const auto& r : scene.patches[p].footprint) {
      for (int v = r.v0; v < r.v1; ++v) {
        for (int u = r.u0; u < r.u1; ++u) {
          if (owner(u, v) != kUnlabeled) {
            throw std::invalid_argument(
                fmt::format("scene: footprints of patches {} and {} overlap at ({}, {})",
                            owner(u, v), p, u, v));
          }
          owner(u, v) = static_cast<int>(p);
        }
      }
    }
  }
  return owner;
}

/// Whether the right camera sees the point of patch p at left pixel (u, v).
bool visible_in_right(const SceneSpec& scene, int p, const Eigen::Vector3d& point, double disparity,
                      int v) {
  const double u = point.x() / point.z() * scene.camera.focal + scene.camera.principal_u;
  if (u - disparity < -0.5) return false;
  const Eigen::Vector3d origin(scene.camera.baseline, 0.0, 0.0);
  const Eigen::Vector3d dir = point - origin;
  for (std::size_t q = 0; q < scene.patches.size(); ++q) {
    if (static_cast<int>(q) == p) continue;
    const double s = intersect(scene.patches[q], origin, dir);
    if (!(s > 1e-9 && s < 1.0 - 1e-9)) continue;
    const Eigen::Vector3d hit = origin + s * dir;
    const double u_hit = hit.x() / hit.z() * scene.camera.focal + scene.camera.principal_u;
    if (footprint_contains(scene.patches[q], scene.width, u_hit, v)) return false;
  }
  return true;
}

TraversabilityClass slope_class(double slope, const TraversabilityParams& params) {
  if (slope <= params.alpha_max) return TraversabilityClass::Traversable;
  if (slope <= params.alpha_semi) return TraversabilityClass::SemiTraversable;
  return TraversabilityClass::NonTraversable;
}

/// Analytic classification of every patch from its exact plane and points.
void classify_truth(const SceneSpec& scene, const std::vector<Eigen::Vector3d>& normals,
                    SceneTruth& truth) {
  const Eigen::Vector3d g = scene_gravity(scene);
  const auto& params = scene.traversability;
  const std::size_t n = scene.patches.size();
  truth.patches.assign(n, PatchTruth{});

  std::vector<Eigen::Vector3d> sums(n, Eigen::Vector3d::Zero());
  std::size_t total_points = 0;
  for (std::size_t i = 0; i < truth.labels.size(); ++i) {
    const int p = truth.labels.data()[i];
    if (p == kUnlabeled) continue;
    sums[p] += truth.points.data()[i];
    ++truth.patches[p].pixel_count;
    ++total_points;
  }

  const double area = static_cast<double>(scene.width) * scene.height;
  const auto minimum =
      static_cast<std::size_t>(std::ceil(area * params.min_inlier_ratio - 1e-9 * std::max(1.0, area)));
  std::vector<Eigen::Vector3d> up(n);
  for (std::size_t p = 0; p < n; ++p) {
    auto& t = truth.patches[p];
    up[p] = normals[p].dot(g) <= 0.0 ? normals[p] : Eigen::Vector3d(-normals[p]);
    t.slope = std::atan2(up[p].cross(g).norm(), -up[p].dot(g));
    if (t.pixel_count > 0) t.centroid = sums[p] / static_cast<double>(t.pixel_count);
  }

  int dominant = -1;
  for (std::size_t p = 0; p < n; ++p) {
    const auto& t = truth.patches[p];
    if (t.pixel_count < minimum || t.pixel_count == 0) continue;
    if (slope_class(t.slope, params) != TraversabilityClass::Traversable) continue;
    if (!(up[p].dot(g) < 0.0) || !(t.centroid.dot(g) > 0.0)) continue;
    if (dominant < 0 || t.pixel_count > truth.patches[dominant].pixel_count) {
      dominant = static_cast<int>(p);
    }
  }
  truth.accepted = dominant >= 0 && static_cast<double>(truth.patches[dominant].pixel_count) >=
                                        params.quality_min_ratio * static_cast<double>(total_points);
  truth.dominant_patch = truth.accepted ? dominant : -1;

  for (std::size_t p = 0; p < n; ++p) {
    auto& t = truth.patches[p];
    t.step_distance = kNaN;
    if (!truth.accepted || t.pixel_count < minimum || t.pixel_count < 3) {
      t.truth_class = TraversabilityClass::Undecided;
      continue;
    }
    t.truth_class = slope_class(t.slope, params);
    // Distance to the dominant patch's exact plane, with its normal taken upward.
    const double dominant_offset =
        scene.patches[dominant].offset / scene.patches[dominant].normal.norm() *
        (up[dominant].dot(normals[dominant]) > 0.0 ? 1.0 : -1.0);
    t.step_distance = std::abs(up[dominant].dot(t.centroid) + dominant_offset);
    if (t.truth_class != TraversabilityClass::NonTraversable && t.step_distance > params.h_max) {
      t.truth_class = TraversabilityClass::NonTraversable;
    }
  }
}

// Scene file keys beyond the config ones.
std::string patch_key(std::size_t p, const char* field) { return fmt::format("patch.{}.{}", p, field); }

struct SceneReader {
  const KeyValueDocument& doc;

  const KeyValueDocument::Entry& entry(const std::string& key) const {
    const auto* e = doc.find(key);
    if (e == nullptr) throw ConfigError(key, 0, "missing");
    return *e;
  }

  std::vector<double> numbers(const std::string& key, std::size_t expected) const {
    const auto& e = entry(key);
    std::istringstream in(e.value);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
        throw ConfigError(key, e.line, fmt::format("expected numbers, got '{}'", token));
      }
      out.push_back(value);
    }
    if (expected > 0 && out.size() != expected) {
      throw ConfigError(key, e.line, fmt::format("expected {} numbers", expected));
    }
    return out;
  }

  long long integer(const std::string& key) const {
    const auto values = numbers(key, 1);
    if (values[0] != std::floor(values[0])) throw ConfigError(key, entry(key).line, "expected an integer");
    return static_cast<long long>(values[0]);
  }

  std::uint64_t seed(const std::string& key) const {
    const auto& e = entry(key);
    std::uint64_t value = 0;
    const std::string& text = e.value;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ConfigError(key, e.line, fmt::format("expected an unsigned integer, got '{}'", text));
    }
    return value;
  }

  std::vector<Rect> rects(const std::string& key) const {
    const auto& e = entry(key);
    std::vector<Rect> out;
    std::stringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ';')) {
      std::istringstream fields(item);
      Rect r;
      std::string rest;
      if (!(fields >> r.u0 >> r.v0 >> r.u1 >> r.v1) || (fields >> rest)) {
        throw ConfigError(key, e.line, fmt::format("expected 'u0 v0 u1 v1', got '{}'", item));
      }
      out.push_back(r);
    }
    if (out.empty()) throw ConfigError(key, e.line, "no rectangles");
    return out;
  }
};

}  // namespace

SceneSpec load_scene(const KeyValueDocument& doc) {
  const SceneReader in{doc};
  KeyValueDocument config_doc;
  const auto& known = config_keys();
  for (const auto& [key, entry] : doc.entries()) {
    if (std::find(known.begin(), known.end(), key) != known.end()) config_doc.set(key, entry.value);
  }
  const PipelineConfig config = load_config(config_doc);

  SceneSpec scene;
  scene.camera = config.camera;
  scene.cloud_to_gravity = config.cloud_to_gravity;
  scene.traversability = config.traversability;
  scene.width = static_cast<int>(in.integer("width"));
  scene.height = static_cast<int>(in.integer("height"));
  if (doc.contains("background_seed")) scene.background_seed = in.seed("background_seed");

  const long long count = in.integer("patch_count");
  if (count < 0) throw ConfigError("patch_count", in.entry("patch_count").line, "must be >= 0");
  std::set<std::string> scene_keys{"width", "height", "background_seed", "patch_count"};
  for (long long p = 0; p < count; ++p) {
    const auto i = static_cast<std::size_t>(p);
    ScenePatch patch;
    const auto n = in.numbers(patch_key(i, "normal"), 3);
    patch.normal = Eigen::Vector3d(n[0], n[1], n[2]);
    patch.offset = in.numbers(patch_key(i, "offset"), 1)[0];
    patch.footprint = in.rects(patch_key(i, "rects"));
    patch.seed = doc.contains(patch_key(i, "seed")) ? in.seed(patch_key(i, "seed")) : i + 1;
    for (const char* field : {"normal", "offset", "rects", "seed"}) scene_keys.insert(patch_key(i, field));
    scene.patches.push_back(std::move(patch));
  }
  for (const auto& [key, entry] : doc.entries()) {
    if (!scene_keys.count(key) && std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(key, entry.line, "unknown scene key");
    }
  }
  check_scene(scene);
  owner_map(scene);
  return scene;
}

SceneSpec load_scene_file(const std::string& path) {
  return load_scene(KeyValueDocument::parse_file(path));
}

KeyValueDocument to_document(const SceneSpec& scene) {
  PipelineConfig config;
  config.camera = scene.camera;
  config.traversability = scene.traversability;
  config.cloud_to_gravity = scene.cloud_to_gravity;
  const KeyValueDocument full = to_document(config);
  KeyValueDocument doc;
  for (const char* key : {"focal", "principal_u", "principal_v", "baseline", "tilt_theta",
                          "frame_rotation", "alpha_r", "alpha_max", "alpha_semi", "h_max",
                          "min_inlier_ratio", "quality_min_ratio"}) {
    doc.set(key, full.find(key)->value);
  }
  doc.set("width", std::to_string(scene.width));
  doc.set("height", std::to_string(scene.height));
  doc.set("background_seed", std::to_string(scene.background_seed));
  doc.set("patch_count", std::to_string(scene.patches.size()));
  for (std::size_t p = 0; p < scene.patches.size(); ++p) {
    const auto& patch = scene.patches[p];
    doc.set(patch_key(p, "normal"), fmt::format("{:.17g} {:.17g} {:.17g}", patch.normal.x(),
                                                patch.normal.y(), patch.normal.z()));
    doc.set(patch_key(p, "offset"), fmt::format("{:.17g}", patch.offset));
    std::string rects;
    for (const auto& r : patch.footprint) {
      if (!rects.empty()) rects += "; ";
      rects += fmt::format("{} {} {} {}", r.u0, r.v0, r.u1, r.v1);
    }
    doc.set(patch_key(p, "rects"), rects);
    doc.set(patch_key(p, "seed"), std::to_string(patch.seed));
  }
  return doc;
}

Eigen::Vector3d scene_gravity(const SceneSpec& scene) {
  const Eigen::Vector3d world_down(0.0, 0.0, -1.0);
  const Eigen::Matrix3d pitch =
      Eigen::AngleAxisd(scene.camera.tilt_theta, Eigen::Vector3d::UnitX()).toRotationMatrix();
  return (scene.cloud_to_gravity.transpose() * pitch * world_down).normalized();
}

RenderedScene render_scene(const SceneSpec& scene) {
  check_scene(scene);
  const int w = scene.width;
  const int h = scene.height;
  const auto& cam = scene.camera;
  const double fb = cam.focal * cam.baseline;

  std::vector<ScenePatch> patches = scene.patches;
  std::vector<Eigen::Vector3d> normals;
  for (auto& patch : patches) {
    const double norm = patch.normal.norm();
    patch.normal /= norm;
    patch.offset /= norm;
    normals.push_back(patch.normal);
  }
  SceneSpec unit = scene;
  unit.patches = patches;

  RenderedScene out;
  auto& truth = out.truth;
  truth.labels = owner_map(scene);
  truth.disparity = DisparityMap(w, h, 0.0);
  truth.points = OrganizedPointCloud(w, h, invalid_vector());
  truth.normals = NormalMap(w, h, invalid_vector());
  truth.classes = ClassMap(w, h, TraversabilityClass::Unknown);
  out.left = GrayImage(w, h);
  out.right = GrayImage(w, h);

  const Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const int p = truth.labels(u, v);
      if (p == kUnlabeled) {
        out.left(u, v) = to_gray(texture(scene.background_seed, u, v));
        continue;
      }
      const auto& patch = patches[p];
      const Eigen::Vector3d ray = pixel_ray(cam, u, v);
      const double t = intersect(patch, origin, ray);
      if (!(t > 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument(
            fmt::format("scene: patch {} is not in front of the camera at ({}, {})", p, u, v));
      }
      truth.disparity(u, v) = fb / t;
      truth.points(u, v) = t * ray;
      truth.normals(u, v) = patch.offset > 0.0 ? patch.normal : Eigen::Vector3d(-patch.normal);
      if (patch.offset == 0.0) {
        throw std::invalid_argument(fmt::format("scene: patch {} passes through the camera", p));
      }
      out.left(u, v) = to_gray(texture(patch.seed, u, v));
    }
  }

  // Right view: nearest patch hit along each right-camera ray whose left
  // projection lies in that patch's footprint.
  const Eigen::Vector3d right_origin(cam.baseline, 0.0, 0.0);
  for (int v = 0; v < h; ++v) {
    for (int x = 0; x < w; ++x) {
      const Eigen::Vector3d ray = pixel_ray(cam, x, v);
      double best_t = kInf;
      double best_u = 0.0;
      int best = -1;
      for (std::size_t p = 0; p < patches.size(); ++p) {
        const double t = intersect(patches[p], right_origin, ray);
        if (!(t > 0.0) || !std::isfinite(t) || t >= best_t) continue;
        const double u_left = x + fb / t;
        if (!footprint_contains(patches[p], w, u_left, v)) continue;
        best_t = t;
        best_u = u_left;
        best = static_cast<int>(p);
      }
      out.right(x, v) = best < 0 ? to_gray(texture(scene.background_seed, x, v))
                                 : to_gray(texture(patches[best].seed, best_u, v));
    }
  }

  classify_truth(unit, normals, truth);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const int p = truth.labels(u, v);
      if (p == kUnlabeled) continue;
      truth.classes(u, v) = visible_in_right(unit, p, truth.points(u, v), truth.disparity(u, v), v)
                                ? truth.patches[p].truth_class
                                : TraversabilityClass::Unknown;
    }
  }
  return out;
}

DisparityMap rounded_disparity(const DisparityMap& disparity) {
  DisparityMap out = disparity;
  for (auto& d : out.data()) {
    if (is_valid_disparity(d)) d = std::round(d);
  }
  return out;
}

ShiftPair make_shift_pair(int width, int height, int shift, std::uint64_t seed) {
  if (width <= 0 || height <= 0 || shift < 0) {
    throw std::invalid_argument("make_shift_pair: bad size or shift");
  }
  ShiftPair pair{GrayImage(width, height), GrayImage(width, height)};
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) pair.left(u, v) = to_gray(texel(seed, u, v));
    for (int x = 0; x < width; ++x) {
      pair.right(x, v) = x + shift < width ? pair.left(x + shift, v)
                                           : to_gray(texel(seed ^ 0xa5a5a5a5ULL, x, v));
    }
  }
  return pair;
}

ConfusionMatrix confusion_matrix(const ClassMap& predicted, const ClassMap& truth) {
  if (!predicted.same_shape(truth)) throw std::invalid_argument("score: size mismatch");
  ConfusionMatrix m{};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++m[index_of(truth.data()[i])][index_of(predicted.data()[i])];
  }
  return m;
}

ClassScore score(const ConfusionMatrix& confusion) {
  ClassScore s;
  s.confusion = confusion;
  const std::size_t unknown = index_of(TraversabilityClass::Unknown);
  for (std::size_t c = 0; c < kClassCount; ++c) {
    std::size_t row = 0;
    std::size_t column = 0;
    for (std::size_t k = 0; k < kClassCount; ++k) {
      row += confusion[c][k];
      if (k != unknown || c == unknown) column += confusion[k][c];
    }
    const double hits = static_cast<double>(confusion[c][c]);
    s.recall[c] = row > 0 ? hits / static_cast<double>(row) : kNaN;
    s.precision[c] = column > 0 ? hits / static_cast<double>(column) : kNaN;
  }
  return s;
}

ClassScore score(const ClassMap& predicted, const ClassMap& truth) {
  return score(confusion_matrix(predicted, truth));
}

CameraIntrinsics rig_camera(const Rig& rig) {
  CameraIntrinsics cam;
  cam.focal = rig.focal;
  cam.principal_u = (rig.width - 1) / 2.0;
  cam.principal_v = (rig.height - 1) / 2.0;
  cam.baseline = rig.baseline;
  cam.tilt_theta = rig.tilt;
  return cam;
}

WorldSceneBuilder::WorldSceneBuilder(const Rig& rig, const TraversabilityParams& params) : rig_(rig) {
  scene_.width = rig.width;
  scene_.height = rig.height;
  scene_.camera = rig_camera(rig);
  scene_.traversability = params;
  scene_.background_seed = 0x5eed;
  const Eigen::Matrix3d pitch =
      Eigen::AngleAxisd(rig.tilt, Eigen::Vector3d::UnitX()).toRotationMatrix();
  world_to_camera_ = scene_.cloud_to_gravity.transpose() * pitch;
}

Eigen::Vector3d WorldSceneBuilder::to_camera(const Eigen::Vector3d& world_point) const {
  return world_to_camera_ * (world_point - Eigen::Vector3d(0.0, 0.0, rig_.mount_height));
}

double WorldSceneBuilder::row_of(const Eigen::Vector3d& world_point) const {
  const Eigen::Vector3d c = to_camera(world_point);
  if (!(c.z() > 0.0)) throw std::invalid_argument("scene: point behind the camera");
  return c.y() / c.z() * scene_.camera.focal + scene_.camera.principal_v;
}

int WorldSceneBuilder::boundary_row(const Eigen::Vector3d& world_point) const {
  const double row = std::ceil(row_of(world_point) - 1e-9);
  return static_cast<int>(std::clamp(row, 0.0, static_cast<double>(rig_.height)));
}

void WorldSceneBuilder::add_band(const Eigen::Vector3d& world_normal,
                                 const Eigen::Vector3d& world_point, int v0, int v1) {
  v0 = std::max(v0, 0);
  v1 = std::min(v1, rig_.height);
  if (v0 >= v1) return;
  ScenePatch patch;
  patch.normal = world_to_camera_ * world_normal.normalized();
  patch.offset = -patch.normal.dot(to_camera(world_point));
  patch.footprint = {Rect{0, v0, rig_.width, v1}};
  patch.seed = 1000 + scene_.patches.size();
  scene_.patches.push_back(std::move(patch));
}

SceneSpec floor_scene(const Rig& rig, const TraversabilityParams& params, double depth) {
  WorldSceneBuilder b(rig, params);
  const Eigen::Vector3d far(0.0, depth, 0.0);
  b.add_band(Eigen::Vector3d::UnitZ(), far, b.boundary_row(far), rig.height);
  return b.build();
}

SceneSpec ramp_scene(const Rig& rig, const TraversabilityParams& params, double angle, double start,
                     double rise, double setback) {
  WorldSceneBuilder b(rig, params);
  const Eigen::Vector3d edge(0.0, start, 0.0);
  const Eigen::Vector3d foot(0.0, start + setback, 0.0);
  const Eigen::Vector3d top(0.0, foot.y() + rise / std::tan(angle), rise);
  const int crease = b.boundary_row(edge);
  b.add_band(Eigen::Vector3d::UnitZ(), edge, crease, rig.height);
  b.add_band(Eigen::Vector3d(0.0, -std::sin(angle), std::cos(angle)), foot, b.boundary_row(top),
             crease);
  return b.build();
}

SceneSpec wall_scene(const Rig& rig, const TraversabilityParams& params, double distance) {
  WorldSceneBuilder b(rig, params);
  const Eigen::Vector3d foot(0.0, distance, 0.0);
  const int crease = b.boundary_row(foot);
  b.add_band(Eigen::Vector3d::UnitZ(), foot, crease, rig.height);
  b.add_band(-Eigen::Vector3d::UnitY(), foot, 0, crease);
  return b.build();
}

SceneSpec step_scene(const Rig& rig, const TraversabilityParams& params, double step_height,
                     double start, double depth) {
  WorldSceneBuilder b(rig, params);
  const Eigen::Vector3d foot(0.0, start, 0.0);
  const Eigen::Vector3d edge(0.0, start, step_height);
  const Eigen::Vector3d far(0.0, depth, step_height);
  const int crease = b.boundary_row(foot);
  const int lip = b.boundary_row(edge);
  b.add_band(Eigen::Vector3d::UnitZ(), foot, crease, rig.height);
  b.add_band(-Eigen::Vector3d::UnitY(), foot, lip, crease);
  b.add_band(Eigen::Vector3d::UnitZ(), edge, b.boundary_row(far), lip);
  return b.build();
}

}  // namespace terrain
