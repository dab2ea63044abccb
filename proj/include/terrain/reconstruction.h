#pragma once

#include "terrain/config.h"
#include "terrain/grid.h"

namespace terrain {

/// Back-projects every pixel with a positive valid disparity:
///   Z = focal / d * baseline,  X = (u - Up) / focal * Z,  Y = (v - Vp) / focal * Z.
/// d <= 0, INVALID disparities and, when z_max > 0, points beyond z_max come
/// out INVALID.
OrganizedPointCloud triangulate(const DisparityMap& disparity, const CameraIntrinsics& cam,
                                const ReconstructionParams& params = {});

/// Count of valid points over width * height (0 for an empty cloud).
double valid_fraction(const OrganizedPointCloud& cloud);

std::size_t valid_point_count(const OrganizedPointCloud& cloud);

}  // namespace terrain
