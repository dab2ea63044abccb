#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace terrain {

/// Row-major image-shaped container. Pixel (u, v) is column u of row v.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, const T& fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    assert(width >= 0 && height >= 0);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int u, int v) const {
    return u >= 0 && v >= 0 && u < width_ && v < height_;
  }

  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(u);
  }

  T& operator()(int u, int v) { return data_[index(u, v)]; }
  const T& operator()(int u, int v) const { return data_[index(u, v)]; }

  std::span<T> row(int v) {
    return {data_.data() + index(0, v), static_cast<std::size_t>(width_)};
  }
  std::span<const T> row(int v) const {
    return {data_.data() + index(0, v), static_cast<std::size_t>(width_)};
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Grid& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// 8-bit intensity image.
using GrayImage = Grid<std::uint8_t>;

/// Horizontal displacement per left-image pixel; NaN marks INVALID.
using DisparityMap = Grid<double>;

/// 3D point per pixel in the camera frame (X right, Y down, Z forward);
/// NaN coordinates mark INVALID.
using OrganizedPointCloud = Grid<Eigen::Vector3d>;

/// Unit surface normal per pixel; NaN marks INVALID.
using NormalMap = Grid<Eigen::Vector3d>;

inline constexpr double kInvalidDisparity = std::numeric_limits<double>::quiet_NaN();

inline bool is_valid_disparity(double d) { return !std::isnan(d); }

inline Eigen::Vector3d invalid_vector() {
  return Eigen::Vector3d::Constant(std::numeric_limits<double>::quiet_NaN());
}

inline bool is_valid(const Eigen::Vector3d& p) { return !std::isnan(p.x()); }

}  // namespace terrain
