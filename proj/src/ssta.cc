#include "terrain/ssta.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <fmt/format.h>

#include "terrain/reconstruction.h"

namespace terrain {

std::string_view to_string(TraversabilityClass c) {
  switch (c) {
    case TraversabilityClass::Traversable: return "traversable";
    case TraversabilityClass::SemiTraversable: return "semi_traversable";
    case TraversabilityClass::NonTraversable: return "non_traversable";
    case TraversabilityClass::Unknown: return "unknown";
    case TraversabilityClass::Undecided: return "undecided";
  }
  return "undecided";
}

Eigen::Vector3d rotate_about_horizontal(const Eigen::Vector3d& v, double angle) {
  return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitX()) * v;
}

GravityVector gravity_in_camera(double tilt_theta) {
  if (tilt_theta == 0.0) return GravityVector{{0.0, 0.0, -1.0}};
  return GravityVector{rotate_about_horizontal({0.0, 0.0, -1.0}, tilt_theta).normalized()};
}

GravityVector gravity_in_cloud_frame(double tilt_theta, const Eigen::Matrix3d& cloud_to_gravity) {
  return GravityVector{
      (cloud_to_gravity.transpose() * gravity_in_camera(tilt_theta).direction).normalized()};
}

std::optional<SurfacePlane> fit_plane_pca(std::span<const Eigen::Vector3d> points, int segment_id,
                                          const GravityVector& gravity) {
  if (points.size() < 3) return std::nullopt;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d q = p - centroid;
    covariance.noalias() += q * q.transpose();
  }
  covariance /= static_cast<double>(points.size());

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(covariance);
  if (solver.info() != Eigen::Success) return std::nullopt;
  const Eigen::Vector3d ascending = solver.eigenvalues();
  if (ascending(2) <= 0.0 || ascending(1) <= 1e-12 * ascending(2)) return std::nullopt;

  SurfacePlane plane;
  plane.segment_id = segment_id;
  plane.inlier_count = points.size();
  plane.centroid = centroid;
  plane.eigenvalues = Eigen::Vector3d(ascending(2), ascending(1), std::max(ascending(0), 0.0));
  plane.normal = solver.eigenvectors().col(0).normalized();
  if (plane.normal.dot(gravity.direction) > 0.0) plane.normal = -plane.normal;
  plane.offset = -plane.normal.dot(centroid);
  return plane;
}

namespace {

std::vector<std::vector<Eigen::Vector3d>> points_by_segment(const OrganizedPointCloud& cloud,
                                                            const SegmentLabels& labels) {
  if (!cloud.same_shape(labels.labels)) {
    throw std::invalid_argument("ssta: cloud and label grid sizes differ");
  }
  std::vector<std::vector<Eigen::Vector3d>> out(static_cast<std::size_t>(labels.segment_count));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const int id = labels.labels.data()[i];
    const auto& p = cloud.data()[i];
    if (id == kUnlabeled || !is_valid(p)) continue;
    out[static_cast<std::size_t>(id)].push_back(p);
  }
  return out;
}

}  // namespace

std::optional<SurfacePlane> fit_plane_pca(const OrganizedPointCloud& cloud,
                                          const SegmentLabels& labels, int segment_id,
                                          const GravityVector& gravity) {
  if (segment_id < 0 || segment_id >= labels.segment_count) {
    throw std::out_of_range(fmt::format("unknown segment id {}", segment_id));
  }
  if (!cloud.same_shape(labels.labels)) {
    throw std::invalid_argument("ssta: cloud and label grid sizes differ");
  }
  std::vector<Eigen::Vector3d> points;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (labels.labels.data()[i] == segment_id && is_valid(cloud.data()[i])) {
      points.push_back(cloud.data()[i]);
    }
  }
  return fit_plane_pca(points, segment_id, gravity);
}

std::vector<std::optional<SurfacePlane>> fit_all_planes(const OrganizedPointCloud& cloud,
                                                        const SegmentLabels& labels,
                                                        const GravityVector& gravity) {
  const auto groups = points_by_segment(cloud, labels);
  std::vector<std::optional<SurfacePlane>> planes;
  planes.reserve(groups.size());
  for (std::size_t id = 0; id < groups.size(); ++id) {
    planes.push_back(fit_plane_pca(groups[id], static_cast<int>(id), gravity));
  }
  return planes;
}

double slope_angle(const SurfacePlane& plane, const GravityVector& gravity) {
  const Eigen::Vector3d up = -gravity.direction;
  // atan2 keeps full precision near level, where acos of the cosine does not.
  return std::atan2(plane.normal.cross(up).norm(), std::abs(plane.normal.dot(up)));
}

TraversabilityClass classify_slope(const SurfacePlane& plane, const GravityVector& gravity,
                                   const TraversabilityParams& params) {
  const double slope = slope_angle(plane, gravity);
  if (slope <= params.alpha_max) return TraversabilityClass::Traversable;
  if (slope <= params.alpha_semi) return TraversabilityClass::SemiTraversable;
  return TraversabilityClass::NonTraversable;
}

std::size_t min_inliers(int width, int height, double ratio) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("min_inliers: dimensions must be > 0");
  const double exact = static_cast<double>(width) * static_cast<double>(height) * ratio;
  // Absorb representation error of the ratio (0.02 is not exact in binary).
  return static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
}

std::optional<SurfacePlane> find_dominant_ground(std::span<const SurfacePlane> planes,
                                                 std::span<const TraversabilityClass> classes,
                                                 const GravityVector& gravity,
                                                 std::size_t minimum_inliers) {
  if (planes.size() != classes.size()) {
    throw std::invalid_argument("find_dominant_ground: planes and classes differ in length");
  }
  const SurfacePlane* best = nullptr;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const auto& plane = planes[i];
    if (classes[i] != TraversabilityClass::Traversable) continue;
    if (plane.inlier_count < minimum_inliers) continue;
    if (!(plane.normal.dot(gravity.direction) < 0.0)) continue;
    if (!(plane.centroid.dot(gravity.direction) > 0.0)) continue;
    if (best == nullptr || plane.inlier_count > best->inlier_count ||
        (plane.inlier_count == best->inlier_count && plane.segment_id < best->segment_id)) {
      best = &plane;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

bool quality_check(const std::optional<SurfacePlane>& dominant, std::size_t valid_points,
                   const TraversabilityParams& params) {
  if (!dominant) return false;
  return static_cast<double>(dominant->inlier_count) >=
         params.quality_min_ratio * static_cast<double>(valid_points);
}

StepResult classify_step(const SurfacePlane& plane, const SurfacePlane& dominant,
                         const TraversabilityParams& params) {
  StepResult result;
  result.distance = std::abs(dominant.signed_distance(plane.centroid));
  result.violation = result.distance > params.h_max;
  return result;
}

ClassHistogram class_histogram(const ClassMap& classes) {
  ClassHistogram histogram{};
  for (auto c : classes.data()) ++histogram[index_of(c)];
  return histogram;
}

TerrainClassification classify_terrain(const OrganizedPointCloud& cloud, const NormalMap& normals,
                                       const SegmentLabels& labels,
                                       std::span<const std::optional<SurfacePlane>> planes,
                                       const GravityVector& gravity,
                                       const TraversabilityParams& params) {
  if (!cloud.same_shape(normals) || !cloud.same_shape(labels.labels)) {
    throw std::invalid_argument("classify_terrain: input grids differ in size");
  }
  if (planes.size() != static_cast<std::size_t>(labels.segment_count)) {
    throw std::invalid_argument("classify_terrain: expected one plane entry per segment");
  }

  TerrainClassification out;
  out.classes = ClassMap(cloud.width(), cloud.height(), TraversabilityClass::Unknown);
  if (cloud.empty()) return out;
  const std::size_t minimum = min_inliers(cloud.width(), cloud.height(), params.min_inlier_ratio);

  const auto sizes = segment_sizes(labels);
  std::vector<SurfacePlane> candidates;
  std::vector<TraversabilityClass> candidate_classes;
  out.segments.resize(sizes.size());
  for (const auto& [id, count] : sizes) {
    auto& report = out.segments[static_cast<std::size_t>(id)];
    report.segment_id = id;
    report.inlier_count = count;
    report.plane = planes[static_cast<std::size_t>(id)];
    if (!report.plane) continue;
    report.slope = slope_angle(*report.plane, gravity);
    report.slope_class = classify_slope(*report.plane, gravity, params);
    if (count < minimum) continue;
    candidates.push_back(*report.plane);
    candidate_classes.push_back(report.slope_class);
  }

  out.dominant = find_dominant_ground(candidates, candidate_classes, gravity, minimum);
  out.accepted = quality_check(out.dominant, valid_point_count(cloud), params);

  for (auto& report : out.segments) {
    if (!report.plane || report.inlier_count < minimum || !out.accepted) {
      report.final_class = TraversabilityClass::Undecided;
      if (out.dominant && report.plane) {
        report.step_distance = classify_step(*report.plane, *out.dominant, params).distance;
      }
      continue;
    }
    const StepResult step = classify_step(*report.plane, *out.dominant, params);
    report.step_distance = step.distance;
    report.step_violation = step.violation;
    report.final_class = report.slope_class;
    if (step.violation && report.slope_class != TraversabilityClass::NonTraversable) {
      report.final_class = TraversabilityClass::NonTraversable;
    }
  }

  for (int v = 0; v < cloud.height(); ++v) {
    for (int u = 0; u < cloud.width(); ++u) {
      if (!is_valid(cloud(u, v))) continue;
      const int id = labels.labels(u, v);
      out.classes(u, v) = id == kUnlabeled
                              ? TraversabilityClass::Undecided
                              : out.segments[static_cast<std::size_t>(id)].final_class;
    }
  }
  out.histogram = class_histogram(out.classes);
  return out;
}

}  // namespace terrain
