#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "depthsamp/errors.hpp"
#include "depthsamp/samplers.hpp"

namespace depthsamp {
namespace {

double min_pairwise(const std::vector<PixelIndex>& px) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < px.size(); ++a) {
    for (std::size_t b = a + 1; b < px.size(); ++b) {
      d = std::min(d, std::hypot(px[a].x - px[b].x, px[a].y - px[b].y));
    }
  }
  return d;
}

TEST(TargetCount, PublishedBudgets) {
  EXPECT_EQ(target_count(0.01, 240, 960), 2304u);
  EXPECT_EQ(target_count(0.0025, 240, 960), 576u);
  EXPECT_EQ(target_count(0.000625, 240, 960), 144u);
  EXPECT_EQ(target_count(0.01, 240, 320), 768u);
  EXPECT_EQ(target_count(0.0025, 240, 320), 192u);
  EXPECT_EQ(target_count(0.0625 / 100, 240, 320), 48u);
  EXPECT_EQ(target_count(1.0, 4, 4), 16u);
}

TEST(TargetCount, AtLeastOne) { EXPECT_EQ(target_count(1e-9, 4, 4), 1u); }

TEST(TargetCount, RejectsBadRates) {
  EXPECT_THROW(target_count(0.0, 4, 4), ParameterError);
  EXPECT_THROW(target_count(-0.1, 4, 4), ParameterError);
  EXPECT_THROW(target_count(1.5, 4, 4), ParameterError);
}

TEST(RandomMask, FullWhenCountIsEverything) {
  const SamplingMask m = random_mask(2, 2, 4, 17);
  EXPECT_EQ(m.count(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(m.test(i));
}

TEST(RandomMask, Deterministic) {
  EXPECT_EQ(random_mask(30, 40, 57, 5), random_mask(30, 40, 57, 5));
  EXPECT_NE(random_mask(30, 40, 57, 5), random_mask(30, 40, 57, 6));
}

TEST(RandomMask, RowCountsFollowBinomial) {
  // Each row holds 100 of 10^4 pixels, so a row's count has mean 10 and a
  // standard deviation of at most sqrt(1000 * 0.01 * 0.99).
  const int seeds = 50;
  std::vector<double> rows(100, 0.0);
  for (int s = 0; s < seeds; ++s) {
    const SamplingMask m = random_mask(100, 100, 1000, static_cast<std::uint64_t>(s));
    ASSERT_EQ(m.count(), 1000u);
    for (const PixelIndex p : m.pixels()) rows[static_cast<std::size_t>(p.y)] += 1.0;
  }
  const double sigma = std::sqrt(1000 * 0.01 * 0.99) / std::sqrt(seeds);
  for (double r : rows) EXPECT_NEAR(r / seeds, 10.0, 4 * sigma);
}

TEST(RandomMask, CountAboveCapacity) {
  EXPECT_THROW(random_mask(2, 2, 5, 0), CapacityError);
}

TEST(GridMask, TwoByTwoLattice) {
  const SamplingMask m = grid_mask(4, 4, 4);
  EXPECT_EQ(m.pixels(), (std::vector<PixelIndex>{{1, 1}, {3, 1}, {1, 3}, {3, 3}}));
}

TEST(GridMask, SingleCenter) {
  EXPECT_EQ(grid_mask(5, 5, 1).pixels(), (std::vector<PixelIndex>{{2, 2}}));
}

TEST(GridMask, WideImageShape) {
  const GridShape s = grid_shape(240, 960, 2304);
  EXPECT_EQ(s.rows, 24);
  EXPECT_EQ(s.cols, 96);
  EXPECT_GE(s.rows * s.cols, 2304);
  EXPECT_EQ(grid_mask(240, 960, 2304).count(), 2304u);
}

TEST(GridMask, UniformSpacing) {
  const std::vector<PixelIndex> px = grid_mask(240, 960, 2304).pixels();
  // 96 columns over 960 pixels and 24 rows over 240: a 10 px lattice.
  for (const PixelIndex p : px) {
    EXPECT_EQ(p.x % 10, 5);
    EXPECT_EQ(p.y % 10, 5);
  }
}

TEST(GridMask, ExactCountsManyShapes) {
  for (int h : {1, 3, 17, 60}) {
    for (int w : {1, 5, 33, 80}) {
      for (std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t(h * w / 3 + 1),
                            std::size_t(h * w)}) {
        if (n > static_cast<std::size_t>(h * w)) continue;
        EXPECT_EQ(grid_mask(h, w, n).count(), n) << h << "x" << w << " n=" << n;
      }
    }
  }
}

TEST(PoissonMask, ExactCountAndSpacing) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PoissonResult r = poisson_mask(64, 64, 16, seed);
    EXPECT_EQ(r.mask.count(), 16u);
    const double d = min_pairwise(r.mask.pixels());
    EXPECT_GE(d, r.radius);
    EXPECT_GE(d, 8.0);
  }
}

TEST(PoissonMask, Deterministic) {
  const PoissonResult a = poisson_mask(50, 70, 40, 3);
  const PoissonResult b = poisson_mask(50, 70, 40, 3);
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_EQ(a.radius, b.radius);
}

TEST(PoissonMask, DenseBudgetStillExact) {
  const PoissonResult r = poisson_mask(10, 10, 90, 1);
  EXPECT_EQ(r.mask.count(), 90u);
  EXPECT_GE(min_pairwise(r.mask.pixels()), r.radius);
}

TEST(BridsonPoints, RespectRadius) {
  const std::vector<PixelIndex> px = bridson_points(80, 120, 6.5, 12);
  EXPECT_GT(px.size(), 50u);
  EXPECT_GE(min_pairwise(px), 6.5);
}

TEST(MakeMask, DispatchesOnKind) {
  SamplerConfig cfg;
  cfg.rate = 0.01;
  cfg.kind = SamplerKind::kGrid;
  EXPECT_EQ(make_mask(cfg, 40, 50), grid_mask(40, 50, 20));
  cfg.kind = SamplerKind::kPoisson;
  EXPECT_EQ(make_mask(cfg, 40, 50).count(), 20u);
}

TEST(RingOffsets, FirstRingOrder) {
  EXPECT_EQ(ring_offsets(1), (std::vector<PixelIndex>{
                                 {1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, -1}, {1, 1}, {-1, 1}, {-1, -1}}));
}

TEST(RingOffsets, SizesAndDistanceOrder) {
  for (int k = 1; k <= 5; ++k) {
    const std::vector<PixelIndex> r = ring_offsets(k);
    EXPECT_EQ(r.size(), static_cast<std::size_t>(8 * k));
    for (std::size_t i = 1; i < r.size(); ++i) {
      EXPECT_LE(r[i - 1].x * r[i - 1].x + r[i - 1].y * r[i - 1].y, r[i].x * r[i].x + r[i].y * r[i].y);
    }
  }
}

TEST(LocationsToMask, Rounding) {
  const SamplingMask m = locations_to_mask({{1.4, 2.6}}, 5, 5);
  EXPECT_EQ(m.pixels(), (std::vector<PixelIndex>{{1, 3}}));
}

TEST(LocationsToMask, CollisionPushedEast) {
  const SamplingMask m = locations_to_mask({{0.0, 0.0}, {0.4, 0.0}}, 8, 8);
  EXPECT_EQ(m.pixels(), (std::vector<PixelIndex>{{0, 0}, {1, 0}}));
}

TEST(LocationsToMask, ConservesCount) {
  SampleSet pile(25, Point2{2.0, 2.0});
  EXPECT_EQ(locations_to_mask(pile, 5, 5).count(), 25u);
  SampleSet corner(10, Point2{0.0, 0.0});
  EXPECT_EQ(locations_to_mask(corner, 3, 7).count(), 10u);
}

TEST(LocationsToMask, Errors) {
  EXPECT_THROW(locations_to_mask(SampleSet(5, Point2{}), 2, 2), CapacityError);
  EXPECT_THROW(locations_to_mask({{4.0, 0.0}}, 2, 2), ParameterError);
  EXPECT_THROW(locations_to_mask({{-0.6, 0.0}}, 2, 2), ParameterError);
}

TEST(ApplyMask, AllOnesIsIdentity) {
  DepthMap d(3, 2);
  for (std::size_t i = 0; i < d.size(); ++i) d.set(i, 100.0 + i);
  d.invalidate(std::size_t{4});
  SamplingMask all(3, 2);
  for (std::size_t i = 0; i < all.size(); ++i) all.set(i);
  EXPECT_EQ(apply_mask(d, all), d);
}

TEST(ApplyMask, AllZerosIsEmpty) {
  DepthMap d(3, 2);
  for (std::size_t i = 0; i < d.size(); ++i) d.set(i, 5.0);
  EXPECT_EQ(apply_mask(d, SamplingMask(3, 2)).valid_count(), 0u);
}

TEST(ApplyMask, ConstantDepth) {
  DepthMap d(6, 5);
  for (std::size_t i = 0; i < d.size(); ++i) d.set(i, 1000.0);
  d.invalidate(std::size_t{7});
  const SamplingMask m = random_mask(5, 6, 12, 4);
  const DepthMap s = apply_mask(d, m);
  const std::size_t overlap = m.test(std::size_t{7}) ? 1 : 0;
  EXPECT_EQ(s.valid_count(), m.count() - overlap);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_TRUE(s.depth(i) == 0.0 || s.depth(i) == 1000.0);
  }
}

TEST(ApplyMask, DimensionMismatch) {
  EXPECT_THROW(apply_mask(DepthMap(2, 2), SamplingMask(3, 2)), ParameterError);
}

}  // namespace
}  // namespace depthsamp
