#pragma once

// Sampler x reconstructor evaluation matrix and the temporal-delay / location
// jitter robustness experiments.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depthsamp/reconstruct.hpp"
#include "depthsamp/samplers.hpp"
#include "depthsamp/scenes.hpp"
#include "depthsamp/ssa.hpp"
#include "depthsamp/superpixel.hpp"

namespace depthsamp {

enum class SamplingMethod { kRandom, kGrid, kPoisson, kSps, kSsaRefined };
enum class ReconstructorKind { kColorization, kBilateral, kNearest };

std::string_view to_string(SamplingMethod method);
std::string_view to_string(ReconstructorKind kind);
SamplingMethod parse_sampling_method(std::string_view name);
ReconstructorKind parse_reconstructor(std::string_view name);

struct MethodParams {
  SpsParams sps;
  SsaConfig ssa;
  int refine_steps = 50;
  // Step size in pixels per unit of relative depth error; scaled by the
  // squared mean depth of the frame before use.
  double refine_rate = 0.05;
  SolverConfig solver;
  // Bilateral sigma_s as a fraction of the sample spacing S; the search
  // radius is bilateral_radius * sigma_s.
  double bilateral_sigma_s = 0.5;
  double bilateral_radius = 3.0;
};

// Continuous sampling locations for one frame. Mask-based samplers return
// their pixels in scan order. ssa-refined needs the ground-truth depth.
SampleSet sample_locations(SamplingMethod method, const RgbImage& rgb,
                           const DepthMap* depth, std::size_t count, std::uint64_t seed,
                           const MethodParams& params);

SamplingMask sample_mask(SamplingMethod method, const RgbImage& rgb, const DepthMap* depth,
                         std::size_t count, std::uint64_t seed, const MethodParams& params);

struct Reconstruction {
  DepthMap depth;
  bool converged = true;
};

Reconstruction reconstruct(ReconstructorKind kind, const LabImage& lab,
                           const DepthMap& sparse, const MethodParams& params);

struct ExperimentConfig {
  std::vector<double> rates{0.01, 0.0025, 0.000625};
  std::vector<SamplingMethod> samplers{SamplingMethod::kRandom, SamplingMethod::kGrid,
                                       SamplingMethod::kPoisson, SamplingMethod::kSps};
  std::vector<ReconstructorKind> reconstructors{ReconstructorKind::kColorization};
  std::vector<std::uint64_t> seeds{0};
  MethodParams params;
  int threads = 1;
};

struct EvalRow {
  std::size_t scene = 0;
  std::string scene_name;
  SamplingMethod sampler = SamplingMethod::kRandom;
  ReconstructorKind reconstructor = ReconstructorKind::kColorization;
  double rate = 0.0;
  std::uint64_t seed = 0;
  // Frame delay (temporal) or jitter range in pixels; 0 for plain runs.
  int perturbation = 0;
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t samples = 0;
  std::size_t valid_pixels = 0;
  double time_ms = 0.0;
  bool converged = true;
  std::string error;  // non-empty if the cell failed
};

struct EvalReport {
  std::string perturbation_kind = "none";  // none | temporal | jitter
  std::vector<EvalRow> rows;
};

// Mean over scenes and seeds, keyed by (sampler, reconstructor, rate,
// perturbation), in first-appearance order.
struct AggregateRow {
  SamplingMethod sampler;
  ReconstructorKind reconstructor;
  double rate;
  int perturbation;
  double mae;
  double rmse;
  std::size_t cells;
};
std::vector<AggregateRow> aggregate(const EvalReport& report);

// Mean RMSE of the failure-free rows matching the filter.
double mean_rmse(const EvalReport& report, SamplingMethod sampler,
                 std::optional<int> perturbation = std::nullopt);

// sample -> apply_mask -> reconstruct -> metrics for every
// (scene, sampler, reconstructor, rate, seed) cell.
EvalReport run_matrix(const std::vector<Frame>& scenes, const ExperimentConfig& cfg);

// For every delay d the mask of frame t comes from the RGB of frame t - d and
// is evaluated against frame t, for t = max(delays) .. end.
EvalReport temporal_experiment(const std::vector<Frame>& frames,
                               const std::vector<int>& delays, const ExperimentConfig& cfg);

// Sample locations get independent uniform noise in [-k, k]^2, are clipped to
// the raster and snapped to pixels without losing samples.
EvalReport jitter_experiment(const std::vector<Frame>& scenes, const std::vector<int>& ranges,
                             const ExperimentConfig& cfg);

// Uniform location noise as used by jitter_experiment.
SampleSet jitter_locations(const SampleSet& samples, int range, int height, int width,
                           std::uint64_t seed);

}  // namespace depthsamp
