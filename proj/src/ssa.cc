#include "depthsamp/ssa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "depthsamp/errors.hpp"
#include "depthsamp/random.hpp"

namespace depthsamp {

namespace {

void check_bounds(const DepthMap& depth, Point2 l) {
  if (!(l.x >= 0.0 && l.y >= 0.0 && l.x <= depth.width() - 1 &&
        l.y <= depth.height() - 1)) {
    throw ParameterError("sampling location outside the raster");
  }
}

std::vector<WindowPixel> valid_window(const DepthMap& depth, Point2 l, int window) {
  const int cx = round_half_down(l.x);
  const int cy = round_half_down(l.y);
  const int half = window / 2;
  std::vector<WindowPixel> out;
  for (int y = std::max(cy - half, 0); y <= std::min(cy + half, depth.height() - 1); ++y) {
    for (int x = std::max(cx - half, 0); x <= std::min(cx + half, depth.width() - 1); ++x) {
      if (depth.valid(x, y)) {
        out.push_back({{static_cast<double>(x), static_cast<double>(y)}, depth.depth(x, y)});
      }
    }
  }
  return out;
}

}  // namespace

void validate(const SsaConfig& cfg) {
  if (cfg.window < 3 || cfg.window % 2 == 0) {
    throw ParameterError("SSA window must be odd and at least 3");
  }
  if (!(cfg.temperature > 0.0)) throw ParameterError("temperature must be positive");
  if (!(cfg.schedule.end > 0.0) || cfg.schedule.start < cfg.schedule.end) {
    throw ParameterError("temperature schedule needs start >= end > 0");
  }
  if (cfg.schedule.steps < 0) throw ParameterError("schedule steps must be >= 0");
}

std::vector<double> ssa_weights(Point2 location, std::span<const WindowPixel> window,
                                double temperature) {
  if (!(temperature > 0.0)) throw ParameterError("temperature must be positive");
  if (window.empty()) throw ParameterError("empty sampling window");
  const double inv_t2 = 1.0 / (temperature * temperature);
  std::vector<double> k(window.size());
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < window.size(); ++i) {
    const double dx = location.x - window[i].position.x;
    const double dy = location.y - window[i].position.y;
    k[i] = -(dx * dx + dy * dy) * inv_t2;
    max_logit = std::max(max_logit, k[i]);
  }
  double total = 0.0;
  for (double& v : k) {
    v = std::exp(v - max_logit);
    total += v;
  }
  for (double& v : k) v /= total;
  return k;
}

SoftSample ssa_sample(const DepthMap& depth, Point2 location, const SsaConfig& cfg) {
  validate(cfg);
  check_bounds(depth, location);
  SoftSample s;
  s.window = valid_window(depth, location, cfg.window);
  if (s.window.empty()) throw SamplingError("no valid depth in the SSA window");
  s.weights = ssa_weights(location, s.window, cfg.temperature);

  // dk_i/dl = k_i * (-2 (l - w_i) + 2 sum_j k_j (l - w_j)) / t^2
  const double t2 = cfg.temperature * cfg.temperature;
  Point2 mean_offset;
  for (std::size_t i = 0; i < s.window.size(); ++i) {
    s.value += s.weights[i] * s.window[i].depth;
    mean_offset.x += s.weights[i] * (location.x - s.window[i].position.x);
    mean_offset.y += s.weights[i] * (location.y - s.window[i].position.y);
  }
  for (std::size_t i = 0; i < s.window.size(); ++i) {
    const double ox = location.x - s.window[i].position.x;
    const double oy = location.y - s.window[i].position.y;
    const double scale = 2.0 * s.weights[i] * s.window[i].depth / t2;
    s.gradient.x += scale * (mean_offset.x - ox);
    s.gradient.y += scale * (mean_offset.y - oy);
  }
  return s;
}

SoftSample bilinear_sample(const DepthMap& depth, Point2 location) {
  check_bounds(depth, location);
  const int x0 = depth.width() > 1
                     ? std::min(static_cast<int>(std::floor(location.x)), depth.width() - 2)
                     : 0;
  const int y0 = depth.height() > 1
                     ? std::min(static_cast<int>(std::floor(location.y)), depth.height() - 2)
                     : 0;
  const double fx = location.x - x0;
  const double fy = location.y - y0;

  // Corner weights and their derivatives in x and y.
  struct Corner {
    int x, y;
    double w, dwx, dwy;
  };
  const Corner corners[4] = {
      {x0, y0, (1 - fx) * (1 - fy), -(1 - fy), -(1 - fx)},
      {x0 + 1, y0, fx * (1 - fy), (1 - fy), -fx},
      {x0, y0 + 1, (1 - fx) * fy, -fy, (1 - fx)},
      {x0 + 1, y0 + 1, fx * fy, fy, fx},
  };

  SoftSample s;
  double w_sum = 0.0, wd_sum = 0.0, dwx_sum = 0.0, dwy_sum = 0.0;
  double dwx_d = 0.0, dwy_d = 0.0;
  for (const Corner& c : corners) {
    if (c.x >= depth.width() || c.y >= depth.height()) continue;
    if (!depth.valid(c.x, c.y)) continue;
    const double d = depth.depth(c.x, c.y);
    s.window.push_back({{static_cast<double>(c.x), static_cast<double>(c.y)}, d});
    s.weights.push_back(c.w);
    w_sum += c.w;
    wd_sum += c.w * d;
    dwx_sum += c.dwx;
    dwy_sum += c.dwy;
    dwx_d += c.dwx * d;
    dwy_d += c.dwy * d;
  }
  if (s.window.empty() || !(w_sum > 0.0)) {
    throw SamplingError("no valid depth among the bilinear corners");
  }
  for (double& w : s.weights) w /= w_sum;
  s.value = wd_sum / w_sum;
  s.gradient.x = (dwx_d * w_sum - wd_sum * dwx_sum) / (w_sum * w_sum);
  s.gradient.y = (dwy_d * w_sum - wd_sum * dwy_sum) / (w_sum * w_sum);
  return s;
}

HardSample hard_sample(const DepthMap& depth, Point2 location, int window) {
  check_bounds(depth, location);
  const PixelIndex nearest{round_half_down(location.x), round_half_down(location.y)};
  if (depth.valid(nearest.x, nearest.y)) {
    return {nearest, depth.depth(nearest.x, nearest.y)};
  }
  const auto candidates = valid_window(depth, location, window);
  if (candidates.empty()) throw SamplingError("no valid depth near sampling location");
  double best = std::numeric_limits<double>::infinity();
  const WindowPixel* pick = nullptr;
  for (const WindowPixel& c : candidates) {
    const double dx = c.position.x - location.x;
    const double dy = c.position.y - location.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best) {
      best = d2;
      pick = &c;
    }
  }
  return {{static_cast<int>(pick->position.x), static_cast<int>(pick->position.y)},
          pick->depth};
}

double temperature(int step, const TemperatureSchedule& schedule) {
  if (step < 0 || step > schedule.steps) {
    throw ParameterError("schedule step out of range");
  }
  if (schedule.steps == 0) return schedule.start;
  const double f = static_cast<double>(step) / schedule.steps;
  return schedule.start + (schedule.end - schedule.start) * f;
}

RefineResult refine_locations(const DepthMap& depth, const SampleSet& start,
                              std::span<const double> targets, const SsaConfig& cfg,
                              double learning_rate, int steps) {
  validate(cfg);
  if (!(learning_rate > 0.0)) throw ParameterError("learning rate must be positive");
  if (targets.size() != start.size()) {
    throw ParameterError("one target depth per location required");
  }
  if (steps < 0) throw ParameterError("step count must be non-negative");

  const TemperatureSchedule schedule{cfg.schedule.start, cfg.schedule.end, steps};
  const double max_x = depth.width() - 1;
  const double max_y = depth.height() - 1;

  RefineResult r;
  r.locations = start;
  SampleSet stable = start;
  int climbing = 0;
  double previous = std::numeric_limits<double>::infinity();

  for (int step = 0; step <= steps; ++step) {
    SsaConfig now = cfg;
    now.temperature = temperature(step, schedule);
    double loss = 0.0;
    std::vector<Point2> grad(r.locations.size());
    for (std::size_t s = 0; s < r.locations.size(); ++s) {
      const SoftSample ss = ssa_sample(depth, r.locations[s], now);
      const double resid = ss.value - targets[s];
      loss += resid * resid;
      grad[s] = {2.0 * resid * ss.gradient.x, 2.0 * resid * ss.gradient.y};
    }
    r.loss.push_back(loss);
    climbing = loss > previous ? climbing + 1 : 0;
    if (climbing == 0) stable = r.locations;
    if (climbing >= 10) {
      r.diverged = true;
      r.locations = stable;
      return r;
    }
    previous = loss;
    if (step == steps) break;
    for (std::size_t s = 0; s < r.locations.size(); ++s) {
      r.locations[s].x = std::clamp(r.locations[s].x - learning_rate * grad[s].x, 0.0, max_x);
      r.locations[s].y = std::clamp(r.locations[s].y - learning_rate * grad[s].y, 0.0, max_y);
    }
    r.steps_taken = step + 1;
  }
  return r;
}

}  // namespace depthsamp

namespace depthsamp {

GradientCheckResult gradient_check(int cases, std::uint64_t seed, int window,
                                   double fixed_temperature,
                                   const TemperatureSchedule* schedule, double h) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(seed);
  GradientCheckResult result;
  result.cases = cases;
  constexpr int kPatch = 7;
  auto away_from_half = [](double v) {
    const double frac = v - std::floor(v);
    return std::abs(frac - 0.5) > 1e-3;
  };
  for (int c = 0; c < cases; ++c) {
    DepthMap patch(kPatch, kPatch);
    for (std::size_t i = 0; i < patch.size(); ++i) patch.set(i, uniform(rng, 500.0, 5000.0));
    Point2 l;
    do {
      l = {uniform(rng, 2.0, 4.0), uniform(rng, 2.0, 4.0)};
    } while (!away_from_half(l.x) || !away_from_half(l.y));
    SsaConfig cfg;
    cfg.window = window;
    if (schedule != nullptr && schedule->steps > 0) {
      cfg.temperature = temperature(c % (schedule->steps + 1), *schedule);
    } else if (fixed_temperature > 0.0) {
      cfg.temperature = fixed_temperature;
    } else {
      cfg.temperature = uniform(rng, 0.2, 2.0);
    }
    const SoftSample centre = ssa_sample(patch, l, cfg);
    const Point2 g = centre.gradient;
    // The weights sum to one, so offsetting every depth by the central value
    // leaves the derivative unchanged and removes most of the cancellation.
    auto shifted = [&](Point2 at) {
      const SoftSample s = ssa_sample(patch, at, cfg);
      double v = 0.0;
      for (std::size_t i = 0; i < s.window.size(); ++i) {
        v += s.weights[i] * (s.window[i].depth - centre.value);
      }
      return v;
    };
    const double fx = (shifted({l.x + h, l.y}) - shifted({l.x - h, l.y})) / (2 * h);
    const double fy = (shifted({l.x, l.y + h}) - shifted({l.x, l.y - h})) / (2 * h);
    const double diff = std::hypot(g.x - fx, g.y - fy);
    const double scale = std::max({std::hypot(fx, fy), std::hypot(g.x, g.y), 1e-9});
    result.max_relative_error = std::max(result.max_relative_error, diff / scale);
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace depthsamp
