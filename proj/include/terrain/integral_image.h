#pragma once

#include <algorithm>
#include <vector>

#include "terrain/grid.h"

namespace terrain {

/// Summed-area table over a scalar channel. Entry (x, y) of the
/// (width+1) x (height+1) table holds the sum of all pixels with u < x and
/// v < y, so any axis-aligned rectangle sum costs four lookups.
template <typename Sum = double>
class IntegralImage {
 public:
  IntegralImage() = default;

  template <typename T>
  explicit IntegralImage(const Grid<T>& channel)
      : width_(channel.width()), height_(channel.height()),
        table_(static_cast<std::size_t>(width_ + 1) * (height_ + 1), Sum{}) {
    for (int v = 0; v < height_; ++v) {
      Sum row_sum{};
      const auto row = channel.row(v);
      for (int u = 0; u < width_; ++u) {
        row_sum += static_cast<Sum>(row[u]);
        at(u + 1, v + 1) = at(u + 1, v) + row_sum;
      }
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }

  /// Sum over [u0, u1) x [v0, v1), clipped to the image. Empty rectangles sum to 0.
  Sum sum(int u0, int v0, int u1, int v1) const {
    u0 = std::clamp(u0, 0, width_);
    u1 = std::clamp(u1, 0, width_);
    v0 = std::clamp(v0, 0, height_);
    v1 = std::clamp(v1, 0, height_);
    if (u1 <= u0 || v1 <= v0) return Sum{};
    return at(u1, v1) - at(u0, v1) - at(u1, v0) + at(u0, v0);
  }

  /// Sum over the (2r+1) x (2r+1) window centred on (u, v), clipped.
  Sum window(int u, int v, int r) const { return sum(u - r, v - r, u + r + 1, v + r + 1); }

  Sum total() const { return sum(0, 0, width_, height_); }

 private:
  Sum& at(int x, int y) { return table_[static_cast<std::size_t>(y) * (width_ + 1) + x]; }
  const Sum& at(int x, int y) const {
    return table_[static_cast<std::size_t>(y) * (width_ + 1) + x];
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Sum> table_;
};

template <typename Sum = double, typename T>
IntegralImage<Sum> build_integral(const Grid<T>& channel) {
  return IntegralImage<Sum>(channel);
}

}  // namespace terrain
