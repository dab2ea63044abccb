#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "terrain/config.h"
#include "terrain/grid.h"
#include "terrain/segmentation.h"

namespace terrain {

enum class TraversabilityClass : std::uint8_t {
  Traversable,
  SemiTraversable,
  NonTraversable,
  Unknown,    // no depth
  Undecided,  // depth, but no usable surface
};

inline constexpr std::size_t kClassCount = 5;

using ClassHistogram = std::array<std::size_t, kClassCount>;
using ClassMap = Grid<TraversabilityClass>;

std::string_view to_string(TraversabilityClass c);

inline std::size_t index_of(TraversabilityClass c) { return static_cast<std::size_t>(c); }

/// Unit gravity direction (pointing down) in some frame.
struct GravityVector {
  Eigen::Vector3d direction{0.0, 0.0, -1.0};
};

/// Plane A x + B y + C z + D = 0 fitted to one segment, with (A, B, C) unit
/// and oriented against gravity.
struct SurfacePlane {
  int segment_id = -1;
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  double offset = 0.0;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  std::size_t inlier_count = 0;
  Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();  // descending

  double signed_distance(const Eigen::Vector3d& p) const { return normal.dot(p) + offset; }
};

/// Rotates v about the camera's horizontal (X) axis by `angle` radians.
Eigen::Vector3d rotate_about_horizontal(const Eigen::Vector3d& v, double angle);

/// Gravity in the gravity frame for a camera pitched down by tilt_theta:
/// (0, 0, -1) rotated about the horizontal axis. Exactly (0, 0, -1) at 0.
GravityVector gravity_in_camera(double tilt_theta);

/// gravity_in_camera expressed in the triangulation frame.
GravityVector gravity_in_cloud_frame(double tilt_theta, const Eigen::Matrix3d& cloud_to_gravity);

/// PCA plane through `points`. std::nullopt (REJECTED) for fewer than three
/// points or a covariance of rank < 2.
std::optional<SurfacePlane> fit_plane_pca(std::span<const Eigen::Vector3d> points, int segment_id,
                                          const GravityVector& gravity);

/// PCA plane of one segment's valid points. Throws std::out_of_range for an
/// id outside [0, segment_count).
std::optional<SurfacePlane> fit_plane_pca(const OrganizedPointCloud& cloud,
                                          const SegmentLabels& labels, int segment_id,
                                          const GravityVector& gravity);

/// One entry per segment id.
std::vector<std::optional<SurfacePlane>> fit_all_planes(const OrganizedPointCloud& cloud,
                                                        const SegmentLabels& labels,
                                                        const GravityVector& gravity);

/// Angle between the plane's upward normal and -gravity, radians in [0, pi/2].
double slope_angle(const SurfacePlane& plane, const GravityVector& gravity);

/// slope <= alpha_max: Traversable; <= alpha_semi: SemiTraversable; else NonTraversable.
TraversabilityClass classify_slope(const SurfacePlane& plane, const GravityVector& gravity,
                                   const TraversabilityParams& params);

/// ceil(width * height * ratio).
std::size_t min_inliers(int width, int height, double ratio);

/// Largest Traversable plane with at least `minimum_inliers` points, an
/// upward normal and its centroid below the camera. Ties go to the smaller
/// segment id.
std::optional<SurfacePlane> find_dominant_ground(std::span<const SurfacePlane> planes,
                                                 std::span<const TraversabilityClass> classes,
                                                 const GravityVector& gravity,
                                                 std::size_t minimum_inliers);

/// False (reject the frame) without a dominant plane or when it holds fewer
/// than quality_min_ratio of the valid points.
bool quality_check(const std::optional<SurfacePlane>& dominant, std::size_t valid_points,
                   const TraversabilityParams& params);

struct StepResult {
  double distance = 0.0;  // perpendicular, meters
  bool violation = false;
};

/// Distance from plane's centroid to the dominant plane against h_max.
StepResult classify_step(const SurfacePlane& plane, const SurfacePlane& dominant,
                         const TraversabilityParams& params);

struct SegmentReport {
  int segment_id = -1;
  std::size_t inlier_count = 0;
  std::optional<SurfacePlane> plane;
  double slope = std::numeric_limits<double>::quiet_NaN();          // radians
  double step_distance = std::numeric_limits<double>::quiet_NaN();  // meters
  bool step_violation = false;
  TraversabilityClass slope_class = TraversabilityClass::Undecided;
  TraversabilityClass final_class = TraversabilityClass::Undecided;
};

struct TerrainClassification {
  ClassMap classes;
  std::vector<SegmentReport> segments;
  std::optional<SurfacePlane> dominant;
  bool accepted = false;
  ClassHistogram histogram{};
};

ClassHistogram class_histogram(const ClassMap& classes);

/// Per-pixel five-class labelling. `planes` holds one entry per segment id
/// (nullopt for rejected fits).
TerrainClassification classify_terrain(const OrganizedPointCloud& cloud, const NormalMap& normals,
                                       const SegmentLabels& labels,
                                       std::span<const std::optional<SurfacePlane>> planes,
                                       const GravityVector& gravity,
                                       const TraversabilityParams& params);

}  // namespace terrain
