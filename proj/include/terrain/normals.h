#pragma once

#include "terrain/config.h"
#include "terrain/grid.h"

namespace terrain {

// All three estimators work on the (2r+1)^2 pixel window around each pixel,
// clipped to the image, and skip INVALID points inside the window through a
// parallel integral image of validity counts. A pixel gets a normal only if
// its own point is valid. Valid normals are unit length and face the camera
// (dot(n, p) < 0).

/// Smallest-eigenvalue eigenvector of the window covariance, assembled from
/// integral images of X, Y, Z, XX, YY, ZZ, XY, XZ, YZ. INVALID when fewer
/// than 3 points are in the window, when the covariance has rank < 2, or
/// when the window's surface variation exceeds max_surface_variation.
NormalMap estimate_normals_covariance(const OrganizedPointCloud& cloud, int window_radius,
                                      double max_surface_variation = 1.0 / 3.0);

/// Cross product of the window means of the horizontal and vertical central
/// differences (integral images over their six components).
NormalMap estimate_normals_gradient(const OrganizedPointCloud& cloud, int window_radius);

/// Depth derivatives dZ/du, dZ/dv from window means of a single depth
/// integral image, lifted to 3D through the back-projection Jacobian.
NormalMap estimate_normals_depth_change(const OrganizedPointCloud& cloud, int window_radius,
                                        const CameraIntrinsics& cam);

NormalMap estimate_normals(const OrganizedPointCloud& cloud, const NormalParams& params,
                           const CameraIntrinsics& cam);

}  // namespace terrain
