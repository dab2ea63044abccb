#include "terrain/normals.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "terrain/integral_image.h"

namespace terrain {
namespace {

using Channel = Grid<double>;

void check_radius(int window_radius) {
  if (window_radius < 1) throw std::invalid_argument("normal window radius must be >= 1");
}

/// Flips n toward the camera. Returns false when n is edge-on to the view ray.
bool face_camera(Eigen::Vector3d& n, const Eigen::Vector3d& point) {
  const double facing = n.dot(point);
  if (facing == 0.0 || !std::isfinite(facing)) return false;
  if (facing > 0.0) n = -n;
  return true;
}

Eigen::Vector3d mean_valid_point(const OrganizedPointCloud& cloud) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  std::size_t count = 0;
  for (const auto& p : cloud.data()) {
    if (!is_valid(p)) continue;
    sum += p;
    ++count;
  }
  return count == 0 ? sum : Eigen::Vector3d(sum / static_cast<double>(count));
}

}  // namespace

NormalMap estimate_normals_covariance(const OrganizedPointCloud& cloud, int window_radius,
                                      double max_surface_variation) {
  check_radius(window_radius);
  const int w = cloud.width();
  const int h = cloud.height();
  NormalMap normals(w, h, invalid_vector());
  if (cloud.empty()) return normals;

  // Centring on the cloud mean keeps the second moments well conditioned.
  const Eigen::Vector3d origin = mean_valid_point(cloud);

  enum { kX, kY, kZ, kXX, kYY, kZZ, kXY, kXZ, kYZ, kCount, kChannels };
  std::array<Channel, kChannels> channels;
  channels.fill(Channel(w, h, 0.0));
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const auto& p = cloud(u, v);
      if (!is_valid(p)) continue;
      const Eigen::Vector3d q = p - origin;
      channels[kX](u, v) = q.x();
      channels[kY](u, v) = q.y();
      channels[kZ](u, v) = q.z();
      channels[kXX](u, v) = q.x() * q.x();
      channels[kYY](u, v) = q.y() * q.y();
      channels[kZZ](u, v) = q.z() * q.z();
      channels[kXY](u, v) = q.x() * q.y();
      channels[kXZ](u, v) = q.x() * q.z();
      channels[kYZ](u, v) = q.y() * q.z();
      channels[kCount](u, v) = 1.0;
    }
  }
  std::array<IntegralImage<double>, kChannels> sums;
  for (int c = 0; c < kChannels; ++c) {
    sums[c] = IntegralImage<double>(channels[c]);
    channels[c] = Channel();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver;
  const int r = window_radius;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!is_valid(cloud(u, v))) continue;
      const double n = sums[kCount].window(u, v, r);
      if (n < 3.0) continue;
      const Eigen::Vector3d mean(sums[kX].window(u, v, r) / n, sums[kY].window(u, v, r) / n,
                                 sums[kZ].window(u, v, r) / n);
      Eigen::Matrix3d cov;
      cov(0, 0) = sums[kXX].window(u, v, r) / n - mean.x() * mean.x();
      cov(1, 1) = sums[kYY].window(u, v, r) / n - mean.y() * mean.y();
      cov(2, 2) = sums[kZZ].window(u, v, r) / n - mean.z() * mean.z();
      cov(0, 1) = cov(1, 0) = sums[kXY].window(u, v, r) / n - mean.x() * mean.y();
      cov(0, 2) = cov(2, 0) = sums[kXZ].window(u, v, r) / n - mean.x() * mean.z();
      cov(1, 2) = cov(2, 1) = sums[kYZ].window(u, v, r) / n - mean.y() * mean.z();

      solver.compute(cov);
      if (solver.info() != Eigen::Success) continue;
      const Eigen::Vector3d lambda = solver.eigenvalues();  // ascending
      const double smallest = std::max(lambda(0), 0.0);
      const double trace = smallest + lambda(1) + lambda(2);
      if (lambda(2) <= 0.0 || lambda(1) <= 1e-10 * lambda(2)) continue;
      if (smallest / trace > max_surface_variation) continue;

      Eigen::Vector3d normal = solver.eigenvectors().col(0).normalized();
      if (!face_camera(normal, cloud(u, v))) continue;
      normals(u, v) = normal;
    }
  }
  return normals;
}

NormalMap estimate_normals_gradient(const OrganizedPointCloud& cloud, int window_radius) {
  check_radius(window_radius);
  const int w = cloud.width();
  const int h = cloud.height();
  NormalMap normals(w, h, invalid_vector());
  if (cloud.empty()) return normals;

  // Central differences, counted only where both directions are available.
  enum { kHx, kHy, kHz, kVx, kVy, kVz, kCount, kChannels };
  std::array<Channel, kChannels> channels;
  channels.fill(Channel(w, h, 0.0));
  for (int v = 1; v + 1 < h; ++v) {
    for (int u = 1; u + 1 < w; ++u) {
      const auto& left = cloud(u - 1, v);
      const auto& right = cloud(u + 1, v);
      const auto& up = cloud(u, v - 1);
      const auto& down = cloud(u, v + 1);
      if (!is_valid(left) || !is_valid(right) || !is_valid(up) || !is_valid(down)) continue;
      const Eigen::Vector3d horizontal = right - left;
      const Eigen::Vector3d vertical = down - up;
      channels[kHx](u, v) = horizontal.x();
      channels[kHy](u, v) = horizontal.y();
      channels[kHz](u, v) = horizontal.z();
      channels[kVx](u, v) = vertical.x();
      channels[kVy](u, v) = vertical.y();
      channels[kVz](u, v) = vertical.z();
      channels[kCount](u, v) = 1.0;
    }
  }
  std::array<IntegralImage<double>, kChannels> sums;
  for (int c = 0; c < kChannels; ++c) {
    sums[c] = IntegralImage<double>(channels[c]);
    channels[c] = Channel();
  }

  const int r = window_radius;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!is_valid(cloud(u, v))) continue;
      const double n = sums[kCount].window(u, v, r);
      if (n < 1.0) continue;
      const Eigen::Vector3d horizontal(sums[kHx].window(u, v, r), sums[kHy].window(u, v, r),
                                       sums[kHz].window(u, v, r));
      const Eigen::Vector3d vertical(sums[kVx].window(u, v, r), sums[kVy].window(u, v, r),
                                     sums[kVz].window(u, v, r));
      Eigen::Vector3d normal = vertical.cross(horizontal);
      const double scale = horizontal.norm() * vertical.norm();
      if (scale == 0.0 || normal.norm() <= 1e-9 * scale) continue;
      normal.normalize();
      if (!face_camera(normal, cloud(u, v))) continue;
      normals(u, v) = normal;
    }
  }
  return normals;
}

NormalMap estimate_normals_depth_change(const OrganizedPointCloud& cloud, int window_radius,
                                        const CameraIntrinsics& cam) {
  check_radius(window_radius);
  const int w = cloud.width();
  const int h = cloud.height();
  NormalMap normals(w, h, invalid_vector());
  if (cloud.empty()) return normals;

  Channel depth(w, h, 0.0);
  Channel valid(w, h, 0.0);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const auto& p = cloud(u, v);
      if (!is_valid(p)) continue;
      depth(u, v) = p.z();
      valid(u, v) = 1.0;
    }
  }
  const IntegralImage<double> depth_sum(depth);
  const IntegralImage<double> count_sum(valid);

  // Mean depth of a rectangle, or NaN when it holds no valid point.
  auto mean_depth = [&](int u0, int v0, int u1, int v1) {
    const double n = count_sum.sum(u0, v0, u1, v1);
    return n > 0.0 ? depth_sum.sum(u0, v0, u1, v1) / n : std::nan("");
  };

  const int r = window_radius;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const auto& p = cloud(u, v);
      if (!is_valid(p)) continue;
      // Symmetric half-windows so the strip centroids sit (k+1)/2 px from the pixel.
      const int ku = std::min({r, u, w - 1 - u});
      const int kv = std::min({r, v, h - 1 - v});
      if (ku < 1 || kv < 1) continue;
      const double dz_du =
          (mean_depth(u + 1, v - r, u + ku + 1, v + r + 1) - mean_depth(u - ku, v - r, u, v + r + 1)) /
          (ku + 1);
      const double dz_dv =
          (mean_depth(u - r, v + 1, u + r + 1, v + kv + 1) - mean_depth(u - r, v - kv, u + r + 1, v)) /
          (kv + 1);
      if (!std::isfinite(dz_du) || !std::isfinite(dz_dv)) continue;

      const double z = p.z();
      const Eigen::Vector3d ray((u - cam.principal_u) / cam.focal, (v - cam.principal_v) / cam.focal,
                                1.0);
      const Eigen::Vector3d along_u = dz_du * ray + Eigen::Vector3d(z / cam.focal, 0.0, 0.0);
      const Eigen::Vector3d along_v = dz_dv * ray + Eigen::Vector3d(0.0, z / cam.focal, 0.0);
      Eigen::Vector3d normal = along_u.cross(along_v);
      const double scale = along_u.norm() * along_v.norm();
      if (scale == 0.0 || normal.norm() <= 1e-9 * scale) continue;
      normal.normalize();
      if (!face_camera(normal, p)) continue;
      normals(u, v) = normal;
    }
  }
  return normals;
}

NormalMap estimate_normals(const OrganizedPointCloud& cloud, const NormalParams& params,
                           const CameraIntrinsics& cam) {
  switch (params.method) {
    case NormalMethod::CovarianceMatrix:
      return estimate_normals_covariance(cloud, params.window_radius, params.max_surface_variation);
    case NormalMethod::Average3DGradient:
      return estimate_normals_gradient(cloud, params.window_radius);
    case NormalMethod::AverageDepthChange:
      return estimate_normals_depth_change(cloud, params.window_radius, cam);
  }
  throw std::invalid_argument("unknown normal method");
}

}  // namespace terrain
