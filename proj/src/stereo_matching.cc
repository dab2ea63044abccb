#include "terrain/stereo_matching.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <vector>

#include <fmt/format.h>

namespace terrain {
namespace {

void check_inputs(const GrayImage& left, const GrayImage& right, const MatcherParams& params) {
  if (!left.same_shape(right)) {
    throw StereoError(fmt::format("stereo pair size mismatch: {}x{} vs {}x{}", left.width(),
                                  left.height(), right.width(), right.height()));
  }
  if (left.empty()) throw StereoError("stereo pair is empty");
  if (params.max_disparity < 1) throw StereoError("max_disparity must be >= 1");
  if (params.max_disparity >= left.width()) {
    throw StereoError(fmt::format("max_disparity {} must be smaller than the image width {}",
                                  params.max_disparity, left.width()));
  }
  if (params.block_radius < 0) throw StereoError("block_radius must be >= 0");
  if (params.smoothness_p1 < 0.0 || params.smoothness_p2 < params.smoothness_p1) {
    throw StereoError("smoothness penalties must satisfy 0 <= p1 <= p2");
  }
}

/// Aggregated truncated-AD cost for every left pixel and disparity.
/// Entry (u, v, d) compares the left window at u with the right window at
/// u - d; it is only meaningful when both windows are inside the image.
class CostVolume {
 public:
  CostVolume(const GrayImage& left, const GrayImage& right, const MatcherParams& params)
      : width_(left.width()), height_(left.height()), levels_(params.max_disparity + 1),
        radius_(params.block_radius),
        costs_(static_cast<std::size_t>(width_) * height_ * levels_, 0) {
    const int truncation = params.cost_truncation;
    const int w = width_;
    const int h = height_;
    std::vector<std::int32_t> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    auto at = [&](int x, int y) -> std::int32_t& {
      return integral[static_cast<std::size_t>(y) * (w + 1) + x];
    };
    for (int d = 0; d < levels_; ++d) {
      for (int v = 0; v < h; ++v) {
        std::int32_t row_sum = 0;
        const auto l = left.row(v);
        const auto r = right.row(v);
        for (int u = 0; u < w; ++u) {
          int diff = 0;
          if (u >= d) diff = std::min(std::abs(int{l[u]} - int{r[u - d]}), truncation);
          row_sum += diff;
          at(u + 1, v + 1) = at(u + 1, v) + row_sum;
        }
      }
      for (int v = radius_; v < h - radius_; ++v) {
        for (int u = radius_ + d; u < w - radius_; ++u) {
          const int x0 = u - radius_, x1 = u + radius_ + 1;
          const int y0 = v - radius_, y1 = v + radius_ + 1;
          (*this)(u, v, d) = at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
        }
      }
    }
  }

  std::int32_t& operator()(int u, int v, int d) {
    return costs_[(static_cast<std::size_t>(v) * width_ + u) * levels_ + d];
  }
  std::int32_t operator()(int u, int v, int d) const {
    return costs_[(static_cast<std::size_t>(v) * width_ + u) * levels_ + d];
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int levels() const { return levels_; }
  int radius() const { return radius_; }

  bool window_inside(int u, int v) const {
    return u >= radius_ && u < width_ - radius_ && v >= radius_ && v < height_ - radius_;
  }

  /// Largest disparity available to left pixel u.
  int max_left_disparity(int u) const { return std::min(levels_ - 1, u - radius_); }
  /// Largest disparity available to right pixel x (matches left x + d).
  int max_right_disparity(int x) const { return std::min(levels_ - 1, width_ - 1 - radius_ - x); }

 private:
  int width_;
  int height_;
  int levels_;
  int radius_;
  std::vector<std::int32_t> costs_;
};

enum class Reference { Left, Right };

/// Fills row_costs[u * levels + d] for one image row; unavailable
/// disparities get kUnavailable and pixels outside the window band are
/// skipped.
constexpr double kUnavailable = 1e12;

void gather_row(const CostVolume& volume, int v, Reference reference, std::vector<double>& row_costs) {
  const int levels = volume.levels();
  row_costs.assign(static_cast<std::size_t>(volume.width()) * levels, kUnavailable);
  for (int u = volume.radius(); u < volume.width() - volume.radius(); ++u) {
    double* out = row_costs.data() + static_cast<std::size_t>(u) * levels;
    if (reference == Reference::Left) {
      const int dmax = volume.max_left_disparity(u);
      for (int d = 0; d <= dmax; ++d) out[d] = volume(u, v, d);
    } else {
      const int dmax = volume.max_right_disparity(u);
      for (int d = 0; d <= dmax; ++d) out[d] = volume(u + d, v, d);
    }
  }
}

int max_disparity_for(const CostVolume& volume, Reference reference, int u) {
  return reference == Reference::Left ? volume.max_left_disparity(u)
                                      : volume.max_right_disparity(u);
}

/// Smallest-index minimum over costs[0..dmax].
int argmin(const double* costs, int dmax) {
  int best = 0;
  for (int d = 1; d <= dmax; ++d) {
    if (costs[d] < costs[best]) best = d;
  }
  return best;
}

DisparityMap winner_take_all(const CostVolume& volume, Reference reference) {
  DisparityMap out(volume.width(), volume.height(), kInvalidDisparity);
  std::vector<double> row_costs;
  for (int v = volume.radius(); v < volume.height() - volume.radius(); ++v) {
    gather_row(volume, v, reference, row_costs);
    for (int u = volume.radius(); u < volume.width() - volume.radius(); ++u) {
      const int dmax = max_disparity_for(volume, reference, u);
      if (dmax < 0) continue;
      out(u, v) = argmin(row_costs.data() + static_cast<std::size_t>(u) * volume.levels(), dmax);
    }
  }
  return out;
}

/// One directional pass: path[u] = cost[u] + min(path[prev] transitions) - min(path[prev]).
void scanline_pass(const std::vector<double>& row_costs, int levels, int first, int last, int step,
                   double p1, double p2, std::vector<double>& path) {
  path.assign(row_costs.size(), 0.0);
  const auto at = [levels](int u) { return static_cast<std::size_t>(u) * levels; };
  std::copy_n(row_costs.begin() + static_cast<std::ptrdiff_t>(at(first)), levels,
              path.begin() + static_cast<std::ptrdiff_t>(at(first)));
  for (int u = first + step; u != last + step; u += step) {
    const double* prev = path.data() + at(u - step);
    const double* cost = row_costs.data() + at(u);
    double* cur = path.data() + at(u);
    const double prev_min = *std::min_element(prev, prev + levels);
    for (int d = 0; d < levels; ++d) {
      double best = prev[d];
      if (d > 0) best = std::min(best, prev[d - 1] + p1);
      if (d + 1 < levels) best = std::min(best, prev[d + 1] + p1);
      best = std::min(best, prev_min + p2);
      cur[d] = cost[d] + best - prev_min;
    }
  }
}

DisparityMap scanline_optimize(const CostVolume& volume, Reference reference, double p1, double p2) {
  const int levels = volume.levels();
  const int r = volume.radius();
  DisparityMap out(volume.width(), volume.height(), kInvalidDisparity);
  std::vector<double> row_costs, forward, backward, total(static_cast<std::size_t>(levels));
  const int first = r;
  const int last = volume.width() - 1 - r;
  if (first > last) return out;
  for (int v = r; v < volume.height() - r; ++v) {
    gather_row(volume, v, reference, row_costs);
    scanline_pass(row_costs, levels, first, last, +1, p1, p2, forward);
    scanline_pass(row_costs, levels, last, first, -1, p1, p2, backward);
    for (int u = first; u <= last; ++u) {
      const int dmax = max_disparity_for(volume, reference, u);
      if (dmax < 0) continue;
      const std::size_t base = static_cast<std::size_t>(u) * levels;
      for (int d = 0; d <= dmax; ++d) total[d] = forward[base + d] + backward[base + d];
      out(u, v) = argmin(total.data(), dmax);
    }
  }
  return out;
}

}  // namespace

DisparityPair match_block_based_unfiltered(const GrayImage& left, const GrayImage& right,
                                           const MatcherParams& params) {
  check_inputs(left, right, params);
  const CostVolume volume(left, right, params);
  return {winner_take_all(volume, Reference::Left), winner_take_all(volume, Reference::Right)};
}

DisparityMap match_block_based(const GrayImage& left, const GrayImage& right,
                               const MatcherParams& params) {
  const auto pair = match_block_based_unfiltered(left, right, params);
  return lr_consistency_filter(pair.left, pair.right, params.lr_consistency_tol);
}

DisparityPair match_acso_unfiltered(const GrayImage& left, const GrayImage& right,
                                    const MatcherParams& params) {
  check_inputs(left, right, params);
  const CostVolume volume(left, right, params);
  return {scanline_optimize(volume, Reference::Left, params.smoothness_p1, params.smoothness_p2),
          scanline_optimize(volume, Reference::Right, params.smoothness_p1, params.smoothness_p2)};
}

DisparityMap match_acso(const GrayImage& left, const GrayImage& right, const MatcherParams& params) {
  const auto pair = match_acso_unfiltered(left, right, params);
  return lr_consistency_filter(pair.left, pair.right, params.lr_consistency_tol);
}

DisparityMap match_stereo(const GrayImage& left, const GrayImage& right,
                          const MatcherParams& params) {
  return params.algorithm == MatcherAlgorithm::BlockBased ? match_block_based(left, right, params)
                                                          : match_acso(left, right, params);
}

DisparityMap lr_consistency_filter(const DisparityMap& d_left, const DisparityMap& d_right,
                                   int tol) {
  if (!d_left.same_shape(d_right)) throw StereoError("left/right disparity size mismatch");
  DisparityMap out(d_left.width(), d_left.height(), kInvalidDisparity);
  for (int v = 0; v < d_left.height(); ++v) {
    for (int u = 0; u < d_left.width(); ++u) {
      const double d = d_left(u, v);
      if (!is_valid_disparity(d)) continue;
      const long x = std::lround(u - d);
      if (x < 0 || x >= d_left.width()) continue;
      const double back = d_right(static_cast<int>(x), v);
      if (is_valid_disparity(back) && std::abs(back - d) <= tol) out(u, v) = d;
    }
  }
  return out;
}

double valid_fraction(const DisparityMap& disparity) {
  if (disparity.empty()) return 0.0;
  const auto values = disparity.data();
  const auto count = std::count_if(values.begin(), values.end(), is_valid_disparity);
  return static_cast<double>(count) / static_cast<double>(values.size());
}

}  // namespace terrain
