#pragma once

#include <cstddef>
#include <cstdint>

#include "depthsamp/imagedata.hpp"

namespace depthsamp {

enum class SamplerKind { kRandom, kGrid, kPoisson };

struct SamplerConfig {
  double rate = 0.0025;
  std::uint64_t seed = 0;
  SamplerKind kind = SamplerKind::kRandom;
};

// N_s = round(c*H*W) clamped to [1, H*W]. Throws ParameterError unless
// 0 < c <= 1.
std::size_t target_count(double rate, int height, int width);

// Exactly `count` distinct pixels drawn uniformly without replacement.
SamplingMask random_mask(int height, int width, std::size_t count,
                         std::uint64_t seed);

// Regular lattice with half-step margins, trimmed to `count` in scan order.
SamplingMask grid_mask(int height, int width, std::size_t count);

struct GridShape {
  int rows = 0;
  int cols = 0;
};
// Lattice dimensions used by grid_mask.
GridShape grid_shape(int height, int width, std::size_t count);

struct PoissonResult {
  SamplingMask mask;
  // Every pair of mask pixels is at least this far apart.
  double radius = 0.0;
};

// Blue-noise mask: Bridson dart throwing on the pixel lattice, radius found by
// bisection so that the maximal set holds at least `count` points, then
// trimmed at random to exactly `count`.
PoissonResult poisson_mask(int height, int width, std::size_t count,
                           std::uint64_t seed);

// Points produced by one Bridson run at a fixed radius (pixel lattice, k=30
// candidates per active point). Exposed for testing.
std::vector<PixelIndex> bridson_points(int height, int width, double radius,
                                       std::uint64_t seed);

// Builds a mask from the samplers above.
SamplingMask make_mask(const SamplerConfig& cfg, int height, int width);

// Snaps continuous locations to pixels. A location whose pixel is taken moves
// to the nearest free pixel found by a ring search around it, so the count is
// preserved. Throws CapacityError if there are more locations than pixels and
// ParameterError for out-of-bounds locations.
SamplingMask locations_to_mask(const SampleSet& samples, int height, int width);

// Offsets of Chebyshev ring k (k >= 1) in search order: increasing Euclidean
// distance, then clockwise starting from north-east. Ring 1 is
// E, S, W, N, NE, SE, SW, NW (y grows downward).
std::vector<PixelIndex> ring_offsets(int k);

// Sparse depth D' = D (.) B. Throws ParameterError on dimension mismatch.
DepthMap apply_mask(const DepthMap& depth, const SamplingMask& mask);

}  // namespace depthsamp
