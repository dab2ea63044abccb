#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "terrain/config.h"
#include "terrain/grid.h"
#include "terrain/ssta.h"

namespace terrain {

/// Half-open pixel rectangle [u0, u1) x [v0, v1).
struct Rect {
  int u0 = 0;
  int v0 = 0;
  int u1 = 0;
  int v1 = 0;
};

/// Textured plane n.X + offset = 0 in the triangulation frame, visible in the
/// left image over `footprint`. Footprint edges on the image border are
/// treated as unbounded when rendering the right view.
struct ScenePatch {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;
  std::vector<Rect> footprint;
  std::uint64_t seed = 0;
};

/// Pixels outside every footprint see a textured background at infinity
/// (true disparity 0).
struct SceneSpec {
  int width = 0;
  int height = 0;
  CameraIntrinsics camera;
  Eigen::Matrix3d cloud_to_gravity = PipelineConfig::default_cloud_to_gravity();
  TraversabilityParams traversability;
  std::vector<ScenePatch> patches;
  std::uint64_t background_seed = 0;
};

SceneSpec load_scene(const KeyValueDocument& doc);
SceneSpec load_scene_file(const std::string& path);
KeyValueDocument to_document(const SceneSpec& scene);

/// Gravity in the triangulation frame, from the tilt and frame rotation.
Eigen::Vector3d scene_gravity(const SceneSpec& scene);

struct PatchTruth {
  std::size_t pixel_count = 0;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  double slope = 0.0;          // radians
  double step_distance = 0.0;  // to the dominant plane; NaN without one
  TraversabilityClass truth_class = TraversabilityClass::Undecided;
};

struct SceneTruth {
  DisparityMap disparity;      // real-valued; 0 on the background
  OrganizedPointCloud points;  // exact points on the patch planes
  NormalMap normals;           // patch normals facing the camera
  Grid<int> labels;            // patch index, kUnlabeled on the background
  ClassMap classes;
  std::vector<PatchTruth> patches;
  int dominant_patch = -1;
  bool accepted = false;
};

struct RenderedScene {
  GrayImage left;
  GrayImage right;
  SceneTruth truth;
};

/// Throws std::invalid_argument for overlapping or out-of-image footprints
/// and for patches that are not in front of the camera.
RenderedScene render_scene(const SceneSpec& scene);

/// Nearest-integer copy of a real-valued disparity field.
DisparityMap rounded_disparity(const DisparityMap& disparity);

/// Noise pair whose right image is the left one shifted by `shift` pixels:
/// right(x) = left(x + shift).
struct ShiftPair {
  GrayImage left;
  GrayImage right;
};
ShiftPair make_shift_pair(int width, int height, int shift, std::uint64_t seed);

/// Rows are truth classes, columns predicted classes.
using ConfusionMatrix = std::array<std::array<std::size_t, kClassCount>, kClassCount>;

struct ClassScore {
  ConfusionMatrix confusion{};
  std::array<double, kClassCount> precision{};  // NaN when undefined
  std::array<double, kClassCount> recall{};     // NaN when undefined
};

ConfusionMatrix confusion_matrix(const ClassMap& predicted, const ClassMap& truth);
/// Recall per truth row; precision per predicted column, ignoring pixels
/// whose truth is Unknown.
ClassScore score(const ConfusionMatrix& confusion);
ClassScore score(const ClassMap& predicted, const ClassMap& truth);

/// Camera rig above level ground, used by the scene builders.
struct Rig {
  int width = 320;
  int height = 240;
  double focal = 200.0;
  double baseline = 0.45;
  double mount_height = 1.5;  // meters above the ground
  double tilt = 0.5235987755982988;  // 30 degrees, pitched down
};

CameraIntrinsics rig_camera(const Rig& rig);

/// Builds scenes from full-width bands of planes given in a world frame with
/// its origin on the ground below the camera, X right, Y forward, Z up.
class WorldSceneBuilder {
 public:
  WorldSceneBuilder(const Rig& rig, const TraversabilityParams& params);

  /// Real-valued image row of a world point.
  double row_of(const Eigen::Vector3d& world_point) const;
  /// First row at or below the projection of a world point, clamped to the image.
  int boundary_row(const Eigen::Vector3d& world_point) const;

  /// Plane through world_point with the given normal, visible in rows [v0, v1).
  void add_band(const Eigen::Vector3d& world_normal, const Eigen::Vector3d& world_point, int v0,
                int v1);

  SceneSpec build() const { return scene_; }

 private:
  Eigen::Vector3d to_camera(const Eigen::Vector3d& world_point) const;

  Rig rig_;
  Eigen::Matrix3d world_to_camera_;
  SceneSpec scene_;
};

/// Level ground out to `depth` meters.
SceneSpec floor_scene(const Rig& rig, const TraversabilityParams& params, double depth = 8.0);
/// Level ground up to `start` meters, then a ramp of `angle` radians rising to
/// `rise` meters. A positive `setback` puts the ramp's foot that far behind the
/// ground's edge, below the ground plane, so the edge hides where they meet.
SceneSpec ramp_scene(const Rig& rig, const TraversabilityParams& params, double angle,
                     double start = 2.0, double rise = 0.35, double setback = 0.6);
/// Level ground, then a vertical wall at `distance` meters.
SceneSpec wall_scene(const Rig& rig, const TraversabilityParams& params, double distance = 1.6);
/// Level ground, then a raised platform of `step_height` meters from `start`
/// to `depth`, with its riser.
SceneSpec step_scene(const Rig& rig, const TraversabilityParams& params, double step_height,
                     double start = 1.6, double depth = 2.4);

}  // namespace terrain
