#pragma once

// Independent oracles and fixtures shared by the unit tests and the
// acceptance runner. Nothing here calls into the code under test except to
// load configs and scenes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "terrain/config.h"
#include "terrain/grid.h"
#include "terrain/segmentation.h"
#include "terrain/ssta.h"
#include "terrain/synthetic.h"

namespace terrain::testing {

inline constexpr double kDeg = std::numbers::pi / 180.0;

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(TERRAIN_DATA_DIR) / name;
}

inline PipelineConfig canonical_config() {
  return load_config(KeyValueDocument::parse_file(data_path("terrain.cfg").string()));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("terrain_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline GrayImage random_image(int width, int height, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> value(0, 255);
  GrayImage img(width, height);
  for (auto& p : img.data()) p = static_cast<std::uint8_t>(value(rng));
  return img;
}

// ---------------------------------------------------------------------------
// Sums and matching

template <typename T>
double brute_window_sum(const Grid<T>& g, int u0, int v0, int u1, int v1) {
  double s = 0.0;
  for (int v = std::max(v0, 0); v < std::min(v1, g.height()); ++v) {
    for (int u = std::max(u0, 0); u < std::min(u1, g.width()); ++u) s += static_cast<double>(g(u, v));
  }
  return s;
}

/// Truncated-AD cost of matching left (u, v) against right (u - d, v) over a
/// (2r+1)^2 window; nullopt when either window leaves the image.
inline std::optional<long> sad_cost(const GrayImage& left, const GrayImage& right, int u, int v,
                                    int d, int r, int truncation) {
  if (v - r < 0 || v + r >= left.height()) return std::nullopt;
  if (u - r < 0 || u + r >= left.width()) return std::nullopt;
  if (u - d - r < 0 || u - d + r >= left.width()) return std::nullopt;
  long sum = 0;
  for (int dv = -r; dv <= r; ++dv) {
    for (int du = -r; du <= r; ++du) {
      const int diff = std::abs(int{left(u + du, v + dv)} - int{right(u - d + du, v + dv)});
      sum += std::min(diff, truncation);
    }
  }
  return sum;
}

/// Exhaustive winner-take-all, left (reference_left) or right reference.
/// Ties go to the smaller disparity.
inline DisparityMap brute_force_wta(const GrayImage& left, const GrayImage& right, int r,
                                    int max_disparity, int truncation, bool reference_left) {
  DisparityMap out(left.width(), left.height(), kInvalidDisparity);
  for (int v = 0; v < left.height(); ++v) {
    for (int x = 0; x < left.width(); ++x) {
      std::optional<long> best;
      int best_d = -1;
      for (int d = 0; d <= max_disparity; ++d) {
        const int u = reference_left ? x : x + d;
        const auto c = sad_cost(left, right, u, v, d, r, truncation);
        if (c && (!best || *c < *best)) {
          best = c;
          best_d = d;
        }
      }
      if (best) out(x, v) = best_d;
    }
  }
  return out;
}

inline DisparityMap brute_force_lr_filter(const DisparityMap& dl, const DisparityMap& dr, int tol) {
  DisparityMap out(dl.width(), dl.height(), kInvalidDisparity);
  for (int v = 0; v < dl.height(); ++v) {
    for (int u = 0; u < dl.width(); ++u) {
      const double d = dl(u, v);
      if (std::isnan(d)) continue;
      const int x = u - static_cast<int>(d);
      if (x < 0 || x >= dl.width() || std::isnan(dr(x, v))) continue;
      if (std::abs(dr(x, v) - d) <= tol) out(u, v) = d;
    }
  }
  return out;
}

inline bool same_disparity(const DisparityMap& a, const DisparityMap& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.data()[i];
    const double y = b.data()[i];
    if (std::isnan(x) != std::isnan(y)) return false;
    if (!std::isnan(x) && x != y) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Geometry

/// Points where each pixel's ray meets n.X + offset = 0; INVALID where the
/// ray misses or the hit is behind the camera.
inline OrganizedPointCloud analytic_plane_cloud(int width, int height, const CameraIntrinsics& cam,
                                                const Eigen::Vector3d& n, double offset) {
  OrganizedPointCloud cloud(width, height, invalid_vector());
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const Eigen::Vector3d ray((u - cam.principal_u) / cam.focal, (v - cam.principal_v) / cam.focal,
                                1.0);
      const double denom = n.dot(ray);
      if (std::abs(denom) < 1e-12) continue;
      const double t = -offset / denom;
      if (t > 0) cloud(u, v) = t * ray;
    }
  }
  return cloud;
}

/// Total least squares plane through points via SVD of the centred matrix:
/// unit normal (unoriented) and offset with n.x + offset = 0.
struct LsqPlane {
  Eigen::Vector3d normal;
  double offset;
};

inline std::optional<LsqPlane> least_squares_plane(const std::vector<Eigen::Vector3d>& points) {
  if (points.size() < 3) return std::nullopt;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::MatrixXd a(points.size(), 3);
  for (std::size_t i = 0; i < points.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = (points[i] - mean).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  const Eigen::Vector3d n = svd.matrixV().col(2).normalized();
  return LsqPlane{n, -n.dot(mean)};
}

/// Angle between two directions, radians.
inline double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

/// Angle between two unoriented lines, radians in [0, pi/2].
inline double line_angle(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double t = angle_between(a, b);
  return std::min(t, std::numbers::pi - t);
}

inline Eigen::Vector3d random_unit(std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::Vector3d v(g(rng), g(rng), g(rng));
  return v.normalized();
}

// ---------------------------------------------------------------------------
// Segmentation and classification checks

/// Number of 4-adjacent same-segment pairs whose normals differ by more
/// than alpha_r.
inline std::size_t roughness_violations(const NormalMap& normals, const SegmentLabels& labels,
                                        double alpha_r) {
  const double c = std::cos(alpha_r);
  std::size_t bad = 0;
  const auto& l = labels.labels;
  for (int v = 0; v < l.height(); ++v) {
    for (int u = 0; u < l.width(); ++u) {
      const int id = l(u, v);
      if (id == kUnlabeled) continue;
      if (u + 1 < l.width() && l(u + 1, v) == id && normals(u, v).dot(normals(u + 1, v)) < c) ++bad;
      if (v + 1 < l.height() && l(u, v + 1) == id && normals(u, v).dot(normals(u, v + 1)) < c) ++bad;
    }
  }
  return bad;
}

/// True when every segment id is present and forms one 4-connected region.
inline bool segments_connected(const SegmentLabels& labels) {
  const auto& l = labels.labels;
  std::vector<int> seen(static_cast<std::size_t>(labels.segment_count), 0);
  Grid<std::uint8_t> visited(l.width(), l.height(), 0);
  for (int v = 0; v < l.height(); ++v) {
    for (int u = 0; u < l.width(); ++u) {
      const int id = l(u, v);
      if (id == kUnlabeled || visited(u, v)) continue;
      if (id < 0 || id >= labels.segment_count || seen[static_cast<std::size_t>(id)]++) return false;
      std::vector<std::pair<int, int>> stack{{u, v}};
      visited(u, v) = 1;
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        const std::array<std::pair<int, int>, 4> next{{{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}}};
        for (const auto& [nx, ny] : next) {
          if (l.contains(nx, ny) && !visited(nx, ny) && l(nx, ny) == id) {
            visited(nx, ny) = 1;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

/// Predicted-class counts over the pixels of one truth patch that the
/// truth considers decidable (class not Unknown).
inline std::array<std::size_t, kClassCount> patch_prediction(const ClassMap& predicted,
                                                             const SceneTruth& truth, int patch) {
  std::array<std::size_t, kClassCount> counts{};
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (truth.labels.data()[i] != patch) continue;
    if (truth.classes.data()[i] == TraversabilityClass::Unknown) continue;
    ++counts[index_of(predicted.data()[i])];
  }
  return counts;
}

inline TraversabilityClass majority(const std::array<std::size_t, kClassCount>& counts) {
  return static_cast<TraversabilityClass>(std::max_element(counts.begin(), counts.end()) -
                                          counts.begin());
}

}  // namespace terrain::testing
