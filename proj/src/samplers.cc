#include "depthsamp/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "depthsamp/errors.hpp"
#include "depthsamp/random.hpp"

namespace depthsamp {

namespace {

void check_budget(int height, int width, std::size_t count) {
  if (height < 1 || width < 1) throw ParameterError("empty raster");
  if (count > static_cast<std::size_t>(height) * width) {
    throw CapacityError("requested " + std::to_string(count) +
                        " samples on a raster of " +
                        std::to_string(static_cast<std::size_t>(height) * width) +
                        " pixels");
  }
}

}  // namespace

std::size_t target_count(double rate, int height, int width) {
  if (!(rate > 0.0) || rate > 1.0) {
    throw ParameterError("sampling rate must lie in (0, 1], got " +
                         std::to_string(rate));
  }
  if (height < 1 || width < 1) throw ParameterError("empty raster");
  const double pixels = static_cast<double>(height) * width;
  const double n = std::round(rate * pixels);
  return static_cast<std::size_t>(std::clamp(n, 1.0, pixels));
}

SamplingMask random_mask(int height, int width, std::size_t count,
                         std::uint64_t seed) {
  check_budget(height, width, count);
  SamplingMask mask(width, height);
  std::vector<std::size_t> idx(mask.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  // Partial Fisher-Yates: the first `count` entries are a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + uniform_index(rng, idx.size() - i);
    std::swap(idx[i], idx[j]);
    mask.set(idx[i]);
  }
  return mask;
}

GridShape grid_shape(int height, int width, std::size_t count) {
  check_budget(height, width, count);
  if (count == 0) return {0, 0};
  const double n = static_cast<double>(count);
  int rows = static_cast<int>(std::round(std::sqrt(n * height / width)));
  rows = std::clamp(rows, 1, height);
  int cols = static_cast<int>((count + rows - 1) / rows);
  if (cols > width) {
    // A lattice wider than the raster would put two points on one column.
    cols = width;
    rows = static_cast<int>((count + cols - 1) / cols);
  }
  return {rows, cols};
}

SamplingMask grid_mask(int height, int width, std::size_t count) {
  const GridShape shape = grid_shape(height, width, count);
  SamplingMask mask(width, height);
  const double step_x = static_cast<double>(width) / std::max(shape.cols, 1);
  const double step_y = static_cast<double>(height) / std::max(shape.rows, 1);
  for (int r = 0; r < shape.rows && mask.count() < count; ++r) {
    const int y = std::min(static_cast<int>(std::floor((r + 0.5) * step_y)), height - 1);
    for (int c = 0; c < shape.cols && mask.count() < count; ++c) {
      const int x = std::min(static_cast<int>(std::floor((c + 0.5) * step_x)), width - 1);
      mask.set(x, y);
    }
  }
  return mask;
}

SamplingMask make_mask(const SamplerConfig& cfg, int height, int width) {
  const std::size_t n = target_count(cfg.rate, height, width);
  switch (cfg.kind) {
    case SamplerKind::kRandom:
      return random_mask(height, width, n, cfg.seed);
    case SamplerKind::kGrid:
      return grid_mask(height, width, n);
    case SamplerKind::kPoisson:
      return poisson_mask(height, width, n, cfg.seed).mask;
  }
  throw ParameterError("unknown sampler kind");
}

std::vector<PixelIndex> ring_offsets(int k) {
  std::vector<PixelIndex> ring;
  if (k < 1) return ring;
  for (int dy = -k; dy <= k; ++dy) {
    for (int dx = -k; dx <= k; ++dx) {
      if (std::max(std::abs(dx), std::abs(dy)) == k) ring.push_back({dx, dy});
    }
  }
  // Clockwise angle (y down) measured from the north-east diagonal.
  auto angle_key = [](const PixelIndex& o) {
    const double deg = std::atan2(static_cast<double>(o.y), static_cast<double>(o.x)) *
                       180.0 / 3.14159265358979323846;
    return std::fmod(deg + 45.0 + 720.0, 360.0);
  };
  std::sort(ring.begin(), ring.end(), [&](const PixelIndex& a, const PixelIndex& b) {
    const int da = a.x * a.x + a.y * a.y;
    const int db = b.x * b.x + b.y * b.y;
    if (da != db) return da < db;
    return angle_key(a) < angle_key(b);
  });
  return ring;
}

SamplingMask locations_to_mask(const SampleSet& samples, int height, int width) {
  if (samples.size() > static_cast<std::size_t>(height) * width) {
    throw CapacityError(std::to_string(samples.size()) +
                        " locations do not fit on the raster");
  }
  SamplingMask mask(width, height);
  std::vector<std::vector<PixelIndex>> rings;  // cached ring offsets
  for (const Point2& p : samples) {
    if (!(p.x >= 0.0 && p.x <= width - 1 && p.y >= 0.0 && p.y <= height - 1)) {
      throw ParameterError("sample location out of bounds");
    }
    const int px = round_half_down(p.x);
    const int py = round_half_down(p.y);
    if (!mask.test(px, py)) {
      mask.set(px, py);
      continue;
    }
    bool placed = false;
    for (int k = 1; !placed; ++k) {
      if (k > std::max(width, height)) break;
      if (static_cast<int>(rings.size()) < k) rings.push_back(ring_offsets(k));
      for (const PixelIndex& o : rings[k - 1]) {
        const int x = px + o.x;
        const int y = py + o.y;
        if (x < 0 || y < 0 || x >= width || y >= height || mask.test(x, y)) continue;
        mask.set(x, y);
        placed = true;
        break;
      }
    }
    if (!placed) throw CapacityError("no free pixel left for sample");
  }
  return mask;
}

DepthMap apply_mask(const DepthMap& depth, const SamplingMask& mask) {
  if (depth.width() != mask.width() || depth.height() != mask.height()) {
    throw ParameterError("depth map and mask dimensions differ");
  }
  DepthMap out(depth.width(), depth.height());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (mask.test(i) && depth.valid(i)) out.set(i, depth.depth(i));
  }
  return out;
}

}  // namespace depthsamp
