#include "terrain/reconstruction.h"

#include <algorithm>

namespace terrain {

OrganizedPointCloud triangulate(const DisparityMap& disparity, const CameraIntrinsics& cam,
                                const ReconstructionParams& params) {
  OrganizedPointCloud cloud(disparity.width(), disparity.height(), invalid_vector());
  for (int v = 0; v < disparity.height(); ++v) {
    for (int u = 0; u < disparity.width(); ++u) {
      const double d = disparity(u, v);
      if (!is_valid_disparity(d) || d <= 0.0) continue;
      const double z = (cam.focal / d) * cam.baseline;
      if (params.z_max > 0.0 && z > params.z_max) continue;
      const double x = ((u - cam.principal_u) / cam.focal) * z;
      const double y = ((v - cam.principal_v) / cam.focal) * z;
      cloud(u, v) = Eigen::Vector3d(x, y, z);
    }
  }
  return cloud;
}

std::size_t valid_point_count(const OrganizedPointCloud& cloud) {
  const auto points = cloud.data();
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const Eigen::Vector3d& p) { return is_valid(p); }));
}

double valid_fraction(const OrganizedPointCloud& cloud) {
  if (cloud.empty()) return 0.0;
  return static_cast<double>(valid_point_count(cloud)) / static_cast<double>(cloud.size());
}

}  // namespace terrain
