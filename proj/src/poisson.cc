// Poisson-disk masks on the pixel lattice (Bridson, "Fast Poisson disk
// sampling in arbitrary dimensions", 2007) with an exact sample budget.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "depthsamp/random.hpp"
#include "depthsamp/samplers.hpp"

namespace depthsamp {

namespace {

constexpr int kAttempts = 30;
constexpr int kBisectionSteps = 24;

class BackgroundGrid {
 public:
  BackgroundGrid(int height, int width, double radius)
      : cell_(radius / std::numbers::sqrt2),
        cols_(static_cast<int>(std::ceil(width / cell_)) + 1),
        rows_(static_cast<int>(std::ceil(height / cell_)) + 1),
        radius2_(radius * radius),
        cells_(static_cast<std::size_t>(cols_) * rows_, -1) {}

  bool fits(const PixelIndex& p, const std::vector<PixelIndex>& points) const {
    const int cx = cell_x(p);
    const int cy = cell_y(p);
    for (int y = std::max(cy - 2, 0); y <= std::min(cy + 2, rows_ - 1); ++y) {
      for (int x = std::max(cx - 2, 0); x <= std::min(cx + 2, cols_ - 1); ++x) {
        const int id = cells_[static_cast<std::size_t>(y) * cols_ + x];
        if (id < 0) continue;
        const double dx = points[id].x - p.x;
        const double dy = points[id].y - p.y;
        if (dx * dx + dy * dy < radius2_) return false;
      }
    }
    return true;
  }

  void insert(const PixelIndex& p, int id) {
    cells_[static_cast<std::size_t>(cell_y(p)) * cols_ + cell_x(p)] = id;
  }

 private:
  int cell_x(const PixelIndex& p) const { return static_cast<int>(p.x / cell_); }
  int cell_y(const PixelIndex& p) const { return static_cast<int>(p.y / cell_); }

  double cell_;
  int cols_;
  int rows_;
  double radius2_;
  std::vector<int> cells_;
};

}  // namespace

std::vector<PixelIndex> bridson_points(int height, int width, double radius,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PixelIndex> points;
  BackgroundGrid grid(height, width, radius);
  std::vector<int> active;

  const PixelIndex first{static_cast<int>(uniform_index(rng, width)),
                         static_cast<int>(uniform_index(rng, height))};
  points.push_back(first);
  grid.insert(first, 0);
  active.push_back(0);

  while (!active.empty()) {
    const std::size_t slot = uniform_index(rng, active.size());
    const PixelIndex base = points[active[slot]];
    bool found = false;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
      const double angle = 2.0 * std::numbers::pi * uniform01(rng);
      const double dist = radius * (1.0 + uniform01(rng));
      const PixelIndex cand{round_half_down(base.x + dist * std::cos(angle)),
                            round_half_down(base.y + dist * std::sin(angle))};
      if (cand.x < 0 || cand.y < 0 || cand.x >= width || cand.y >= height) continue;
      if (!grid.fits(cand, points)) continue;
      grid.insert(cand, static_cast<int>(points.size()));
      active.push_back(static_cast<int>(points.size()));
      points.push_back(cand);
      found = true;
      break;
    }
    if (!found) {
      active[slot] = active.back();
      active.pop_back();
    }
  }
  return points;
}

PoissonResult poisson_mask(int height, int width, std::size_t count,
                           std::uint64_t seed) {
  // Reuses the budget checks of the lattice samplers.
  (void)grid_shape(height, width, count);
  PoissonResult result{SamplingMask(width, height), 0.0};
  if (count == 0) return result;

  const std::uint64_t run_seed = derive_seed(seed, {0});
  const double area = static_cast<double>(height) * width;
  const double diagonal = std::hypot(height, width);

  double lo = 1.0;
  double hi = std::min(2.0 * std::sqrt(area / static_cast<double>(count)) + 1.0,
                       diagonal + 1.0);
  std::vector<PixelIndex> best;
  double best_radius = 0.0;

  // Upper bracket must be infeasible unless even a single point suffices.
  while (hi < diagonal + 1.0) {
    auto pts = bridson_points(height, width, hi, run_seed);
    if (pts.size() < count) break;
    best = std::move(pts);
    best_radius = hi;
    lo = hi;
    hi = std::min(2.0 * hi, diagonal + 1.0);
  }
  for (int step = 0; step < kBisectionSteps; ++step) {
    const double mid = 0.5 * (lo + hi);
    auto pts = bridson_points(height, width, mid, run_seed);
    if (pts.size() >= count) {
      if (mid > best_radius) {
        best = std::move(pts);
        best_radius = mid;
      }
      lo = mid;
    } else {
      hi = mid;
    }
  }

  Rng rng(derive_seed(seed, {1}));
  if (best.size() < count) {
    // Dense budgets: any set of distinct pixels is 1 px apart, so top up a
    // radius-1 run with random free pixels.
    best = bridson_points(height, width, 1.0, run_seed);
    best_radius = 1.0;
    SamplingMask taken(width, height);
    for (const PixelIndex& p : best) taken.set(p.x, p.y);
    std::vector<PixelIndex> free;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (!taken.test(x, y)) free.push_back({x, y});
      }
    }
    for (std::size_t i = 0; best.size() < count; ++i) {
      const std::size_t j = i + uniform_index(rng, free.size() - i);
      std::swap(free[i], free[j]);
      best.push_back(free[i]);
    }
  }

  // Uniform random trim to the exact budget.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + uniform_index(rng, best.size() - i);
    std::swap(best[i], best[j]);
    result.mask.set(best[i].x, best[i].y);
  }
  result.radius = best_radius;
  return result;
}

}  // namespace depthsamp
