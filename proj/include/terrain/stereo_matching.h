#pragma once

#include <stdexcept>

#include "terrain/config.h"
#include "terrain/grid.h"

namespace terrain {

class StereoError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Left-reference and right-reference disparities before the left-right check.
struct DisparityPair {
  DisparityMap left;
  DisparityMap right;
};

// Both matchers search integer disparities d in [0, max_disparity]. A left
// pixel u matches right pixel u - d on the same row. The per-pixel cost is
// min(|L - R|, cost_truncation) summed over a (2r+1)^2 window, r =
// block_radius (r = 0 is allowed here for tests; configs require r >= 1).
// Pixels whose window leaves the image are INVALID. Ties go to the smaller
// disparity.

/// Winner-take-all on the aggregated cost, then the left-right check.
DisparityMap match_block_based(const GrayImage& left, const GrayImage& right,
                               const MatcherParams& params);
DisparityPair match_block_based_unfiltered(const GrayImage& left, const GrayImage& right,
                                           const MatcherParams& params);

/// Scanline optimization over the aggregated cost: one left-to-right and one
/// right-to-left dynamic-programming pass per row with penalties p1 for
/// |delta d| = 1 and p2 for larger jumps, summed, winner-take-all, then the
/// left-right check.
DisparityMap match_acso(const GrayImage& left, const GrayImage& right, const MatcherParams& params);
DisparityPair match_acso_unfiltered(const GrayImage& left, const GrayImage& right,
                                    const MatcherParams& params);

/// Dispatches on params.algorithm.
DisparityMap match_stereo(const GrayImage& left, const GrayImage& right,
                          const MatcherParams& params);

/// Keeps d_left(u,v) = d iff d_right(u - d, v) is valid and within tol of d.
DisparityMap lr_consistency_filter(const DisparityMap& d_left, const DisparityMap& d_right,
                                   int tol);

/// Fraction of pixels with a valid disparity.
double valid_fraction(const DisparityMap& disparity);

}  // namespace terrain
