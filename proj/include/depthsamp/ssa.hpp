#pragma once

// Soft sampling approximation: depth at a continuous location as a
// Gaussian-softmax weighted average of a window of pixel depths, with exact
// gradients with respect to the location. Also the 2x2 bilinear baseline and
// the nearest-pixel rule used at test time.

#include <cstdint>
#include <span>
#include <vector>

#include "depthsamp/imagedata.hpp"

namespace depthsamp {

struct TemperatureSchedule {
  double start = 1.0;
  double end = 0.1;
  int steps = 100;
};

struct SsaConfig {
  int window = 5;  // odd, >= 3
  double temperature = 1.0;
  TemperatureSchedule schedule;
};

// Throws ParameterError when the window is even or < 3, the temperature is
// not positive or the schedule is not start >= end > 0.
void validate(const SsaConfig& cfg);

struct WindowPixel {
  Point2 position;
  double depth = 0.0;
};

struct SoftSample {
  double value = 0.0;
  std::vector<WindowPixel> window;  // valid pixels that carry weight
  std::vector<double> weights;      // parallel to window, sums to 1
  Point2 gradient;                  // d value / d location
};

// k_i = exp(-rho_i^2 / t^2) / sum_j exp(-rho_j^2 / t^2), rho_i = |l - w_i|.
std::vector<double> ssa_weights(Point2 location, std::span<const WindowPixel> window,
                                double temperature);

// Soft sample over the window centered on the nearest pixel, clipped at the
// borders. Invalid pixels are left out and the weights renormalized. Throws
// SamplingError when the window holds no valid pixel.
SoftSample ssa_sample(const DepthMap& depth, Point2 location, const SsaConfig& cfg);

// Bilinear interpolation over the enclosing 2x2 cell (renormalized over
// valid corners) and its analytic gradient.
SoftSample bilinear_sample(const DepthMap& depth, Point2 location);

struct HardSample {
  PixelIndex pixel;
  double depth = 0.0;
};

// Nearest pixel (halves toward the smaller index). If that pixel is invalid,
// the nearest valid pixel inside the window is used instead.
HardSample hard_sample(const DepthMap& depth, Point2 location, int window = 5);

// Linear annealing from schedule.start (step 0) to schedule.end (step steps).
double temperature(int step, const TemperatureSchedule& schedule);

struct RefineResult {
  SampleSet locations;
  std::vector<double> loss;  // objective before each step, then final
  bool diverged = false;
  int steps_taken = 0;
};

// Gradient descent on sum_s (ssa_sample(depth, l_s) - target_s)^2 with the
// temperature annealed over `steps`. Locations are clipped to the raster.
// Stops early, returning the last state before the climb, if the loss grows
// for 10 consecutive steps.
RefineResult refine_locations(const DepthMap& depth, const SampleSet& start,
                              std::span<const double> targets, const SsaConfig& cfg,
                              double learning_rate, int steps);

}  // namespace depthsamp

namespace depthsamp {

struct GradientCheckResult {
  int cases = 0;
  double max_relative_error = 0.0;
  double seconds = 0.0;
};

// Compares ssa_sample gradients with central differences (step h pixels) on
// random 7x7 depth patches. Locations avoid half-integer coordinates, where
// the window recenters and the sample is not differentiable. Temperatures are
// drawn from [0.2, 2] unless `fixed_temperature` is positive; a schedule with
// steps > 0 cycles through its temperatures instead.
GradientCheckResult gradient_check(int cases, std::uint64_t seed, int window = 5,
                                   double fixed_temperature = 0.0,
                                   const TemperatureSchedule* schedule = nullptr,
                                   double h = 1e-4);

}  // namespace depthsamp
