#include <cmath>
#include <cstdint>

#include <gtest/gtest.h>

#include "support.h"
#include "terrain/stereo_matching.h"
#include "terrain/synthetic.h"

namespace terrain {
namespace {

GrayImage row_image(std::initializer_list<int> values) {
  GrayImage img(static_cast<int>(values.size()), 1);
  int u = 0;
  for (int v : values) img(u++, 0) = static_cast<std::uint8_t>(v);
  return img;
}

MatcherParams small_params(MatcherAlgorithm algorithm, int max_disparity, int radius) {
  MatcherParams p;
  p.algorithm = algorithm;
  p.max_disparity = max_disparity;
  p.block_radius = radius;
  p.lr_consistency_tol = 0;
  p.cost_truncation = 255;
  return p;
}

/// Fraction of pixels whose window fits at the true shift that come out
/// valid and exactly equal to it.
double exact_interior_fraction(const DisparityMap& d, int shift, int r) {
  std::size_t total = 0, exact = 0;
  for (int v = r; v < d.height() - r; ++v) {
    for (int u = shift + r; u < d.width() - r; ++u) {
      ++total;
      if (d(u, v) == shift) ++exact;
    }
  }
  return static_cast<double>(exact) / static_cast<double>(total);
}

// Pixels whose true match lies inside the right image.
double valid_interior_fraction(const DisparityMap& d, int shift, int r) {
  std::size_t total = 0, valid = 0;
  for (int v = r; v < d.height() - r; ++v) {
    for (int u = shift + r; u < d.width() - r; ++u) {
      ++total;
      if (is_valid_disparity(d(u, v))) ++valid;
    }
  }
  return static_cast<double>(valid) / static_cast<double>(total);
}

TEST(BlockMatching, OneRowExample) {
  const GrayImage left = row_image({10, 20, 30, 40});
  const GrayImage right = row_image({20, 30, 40, 40});
  const auto pair = match_block_based_unfiltered(left, right, small_params(MatcherAlgorithm::BlockBased, 2, 0));
  EXPECT_EQ(pair.left(1, 0), 1);
  EXPECT_EQ(pair.left(2, 0), 1);
  // Column 3 costs 0 at both d = 0 and d = 1; the tie goes to 0.
  EXPECT_EQ(pair.left(3, 0), 0);
  EXPECT_EQ(pair.left(0, 0), 0);
}

TEST(BlockMatching, MatchesBruteForceOracle) {
  for (std::uint32_t seed = 1; seed <= 6; ++seed) {
    const GrayImage left = testing::random_image(23, 9, seed);
    const GrayImage right = testing::random_image(23, 9, seed + 100);
    for (int r : {0, 1, 2}) {
      MatcherParams p = small_params(MatcherAlgorithm::BlockBased, 6, r);
      p.cost_truncation = 60;
      p.lr_consistency_tol = 1;
      const auto pair = match_block_based_unfiltered(left, right, p);
      const auto dl = testing::brute_force_wta(left, right, r, 6, 60, true);
      const auto dr = testing::brute_force_wta(left, right, r, 6, 60, false);
      EXPECT_TRUE(testing::same_disparity(pair.left, dl)) << "seed " << seed << " r " << r;
      EXPECT_TRUE(testing::same_disparity(pair.right, dr)) << "seed " << seed << " r " << r;
      EXPECT_TRUE(testing::same_disparity(match_block_based(left, right, p),
                                          testing::brute_force_lr_filter(dl, dr, 1)));
    }
  }
}

TEST(Acso, ZeroPenaltiesEqualPerPixelArgmin) {
  for (std::uint32_t seed = 1; seed <= 6; ++seed) {
    const GrayImage left = testing::random_image(31, 7, seed);
    const GrayImage right = testing::random_image(31, 7, seed + 50);
    MatcherParams p = small_params(MatcherAlgorithm::ACSO, 8, 0);
    p.smoothness_p1 = 0.0;
    p.smoothness_p2 = 0.0;
    const auto pair = match_acso_unfiltered(left, right, p);
    const auto dl = testing::brute_force_wta(left, right, 0, 8, 255, true);
    const auto dr = testing::brute_force_wta(left, right, 0, 8, 255, false);
    EXPECT_TRUE(testing::same_disparity(pair.left, dl)) << "seed " << seed;
    EXPECT_TRUE(testing::same_disparity(pair.right, dr)) << "seed " << seed;
    EXPECT_TRUE(testing::same_disparity(match_acso(left, right, p),
                                        testing::brute_force_lr_filter(dl, dr, 0)));
  }
}

TEST(Acso, SinglePixelTieGoesToSmallerDisparity) {
  const GrayImage flat(3, 1, 50);
  MatcherParams p = small_params(MatcherAlgorithm::ACSO, 2, 0);
  const auto pair = match_acso_unfiltered(flat, flat, p);
  for (int u = 0; u < 3; ++u) EXPECT_EQ(pair.left(u, 0), 0);
}

TEST(Matchers, ConstantShiftRecovered) {
  const auto config = testing::canonical_config();
  for (int shift : {1, 7, 18, 33, 40}) {
    const auto pair = make_shift_pair(320, 240, shift, 77 + static_cast<std::uint64_t>(shift));
    MatcherParams p = config.matcher;
    p.algorithm = MatcherAlgorithm::BlockBased;
    const auto bb = match_stereo(pair.left, pair.right, p);
    p.algorithm = MatcherAlgorithm::ACSO;
    const auto acso = match_stereo(pair.left, pair.right, p);
    EXPECT_GE(exact_interior_fraction(bb, shift, p.block_radius), 0.9) << shift;
    EXPECT_GE(exact_interior_fraction(acso, shift, p.block_radius), 0.9) << shift;
    EXPECT_GE(valid_interior_fraction(acso, shift, p.block_radius),
              valid_interior_fraction(bb, shift, p.block_radius))
        << shift;
  }
}

TEST(Matchers, TexturelessPairStaysInRange) {
  const GrayImage flat(40, 12, 128);
  for (auto algorithm : {MatcherAlgorithm::BlockBased, MatcherAlgorithm::ACSO}) {
    MatcherParams p = small_params(algorithm, 10, 2);
    const auto d = match_stereo(flat, flat, p);
    for (double x : d.data()) {
      EXPECT_TRUE(std::isnan(x) || x == 0.0);
    }
  }
}

TEST(Matchers, OutputIsBoundedIntegers) {
  for (std::uint32_t seed = 0; seed < 8; ++seed) {
    const GrayImage left = testing::random_image(48, 16, seed);
    const GrayImage right = testing::random_image(48, 16, seed + 1000);
    for (auto algorithm : {MatcherAlgorithm::BlockBased, MatcherAlgorithm::ACSO}) {
      MatcherParams p = small_params(algorithm, 12, 1);
      p.lr_consistency_tol = 2;
      const auto d = match_stereo(left, right, p);
      ASSERT_TRUE(d.same_shape(left));
      for (double x : d.data()) {
        if (std::isnan(x)) continue;
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, 12.0);
        EXPECT_EQ(x, std::floor(x));
      }
    }
  }
}

GrayImage crop_columns(const GrayImage& img, int first) {
  GrayImage out(img.width() - first, img.height());
  for (int v = 0; v < img.height(); ++v) {
    for (int u = 0; u < out.width(); ++u) out(u, v) = img(u + first, v);
  }
  return out;
}

TEST(BlockMatching, ShiftEquivariance) {
  const auto pair = make_shift_pair(120, 30, 6, 5);
  MatcherParams p = small_params(MatcherAlgorithm::BlockBased, 16, 2);
  p.cost_truncation = 40;
  p.lr_consistency_tol = 1;
  const int s = 9;
  const auto full = match_block_based_unfiltered(pair.left, pair.right, p);
  const auto shifted =
      match_block_based_unfiltered(crop_columns(pair.left, s), crop_columns(pair.right, s), p);
  // Left-reference pixels whose whole candidate range is inside both images.
  for (int v = 0; v < shifted.left.height(); ++v) {
    for (int u = p.max_disparity + p.block_radius; u < shifted.left.width(); ++u) {
      const double a = shifted.left(u, v);
      const double b = full.left(u + s, v);
      EXPECT_TRUE((std::isnan(a) && std::isnan(b)) || a == b) << u << "," << v;
    }
  }
}

TEST(LrConsistency, SelfConsistentFieldPasses) {
  const int c = 3;
  DisparityMap d(12, 4, c);
  const auto out = lr_consistency_filter(d, d, 0);
  for (int v = 0; v < 4; ++v) {
    for (int u = 0; u < 12; ++u) {
      if (u >= c) {
        EXPECT_EQ(out(u, v), c);
      } else {
        EXPECT_TRUE(std::isnan(out(u, v)));
      }
    }
  }
}

TEST(LrConsistency, InvalidRightInvalidatesEverything) {
  DisparityMap dl(10, 3, 2.0);
  DisparityMap dr(10, 3, kInvalidDisparity);
  const auto out = lr_consistency_filter(dl, dr, 5);
  for (double x : out.data()) EXPECT_TRUE(std::isnan(x));
}

TEST(LrConsistency, SingleDisagreementIsDropped) {
  DisparityMap dl(10, 3, 2.0);
  DisparityMap dr(10, 3, 2.0);
  dl(6, 1) = 5.0;  // looks at dr(1, 1) = 2, off by 3
  const auto out = lr_consistency_filter(dl, dr, 1);
  EXPECT_TRUE(testing::same_disparity(out, testing::brute_force_lr_filter(dl, dr, 1)));
  std::size_t invalid_interior = 0;
  for (int v = 0; v < 3; ++v) {
    for (int u = 2; u < 10; ++u) invalid_interior += std::isnan(out(u, v)) ? 1 : 0;
  }
  EXPECT_EQ(invalid_interior, 1u);
  EXPECT_TRUE(std::isnan(out(6, 1)));
}

TEST(Matchers, RejectBadInputs) {
  const GrayImage a(20, 5, 0), b(21, 5, 0);
  MatcherParams p = small_params(MatcherAlgorithm::BlockBased, 4, 1);
  EXPECT_THROW(match_stereo(a, b, p), StereoError);
  p.max_disparity = 20;
  EXPECT_THROW(match_stereo(a, a, p), StereoError);
  p.algorithm = MatcherAlgorithm::ACSO;
  EXPECT_THROW(match_stereo(a, a, p), StereoError);
  DisparityMap d1(4, 4), d2(5, 4);
  EXPECT_THROW(lr_consistency_filter(d1, d2, 0), std::invalid_argument);
}

TEST(Acso, FrontoParallelPlaneMeanErrorBelowOnePixel) {
  const auto config = testing::canonical_config();
  SceneSpec scene;
  scene.width = 160;
  scene.height = 120;
  scene.camera = config.camera;
  scene.camera.principal_u = 79.5;
  scene.camera.principal_v = 59.5;
  scene.camera.tilt_theta = 0.0;
  scene.traversability = config.traversability;
  const double d0 = 17.0;
  ScenePatch wall;
  wall.normal = Eigen::Vector3d(0, 0, -1);
  wall.offset = scene.camera.focal * scene.camera.baseline / d0;
  wall.footprint = {Rect{0, 0, 160, 120}};
  wall.seed = 9;
  scene.patches = {wall};
  const auto r = render_scene(scene);
  const auto d = match_acso(r.left, r.right, config.matcher);
  double err = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (std::isnan(d.data()[i])) continue;
    err += std::abs(d.data()[i] - r.truth.disparity.data()[i]);
    ++n;
  }
  ASSERT_GT(n, d.size() / 2);
  EXPECT_LT(err / static_cast<double>(n), 1.0);
}

TEST(Matchers, HarnessFloorWithinOnePixel) {
  const auto config = testing::canonical_config();
  const auto r = render_scene(floor_scene(Rig{}, config.traversability));
  for (auto algorithm : {MatcherAlgorithm::BlockBased, MatcherAlgorithm::ACSO}) {
    MatcherParams p = config.matcher;
    p.algorithm = algorithm;
    const auto d = match_stereo(r.left, r.right, p);
    const int rad = p.block_radius;
    std::size_t total = 0, good = 0;
    for (int v = rad; v < d.height() - rad; ++v) {
      for (int u = rad; u < d.width() - rad; ++u) {
        if (r.truth.classes(u, v) == TraversabilityClass::Unknown) continue;
        if (u - r.truth.disparity(u, v) < rad) continue;
        ++total;
        if (!std::isnan(d(u, v)) && std::abs(d(u, v) - r.truth.disparity(u, v)) <= 1.0) ++good;
      }
    }
    EXPECT_GE(static_cast<double>(good) / static_cast<double>(total), 0.9) << to_string(algorithm);
  }
}

}  // namespace
}  // namespace terrain
