#pragma once

// Dense depth from RGB + sparse depth: color-affinity propagation with hard
// sample constraints, plus nearest-sample and joint-bilateral baselines.

#include <array>
#include <cstdint>
#include <vector>

#include "depthsamp/imagedata.hpp"

namespace depthsamp {

// 8-connected pixel graph. Each pixel lists up to 8 neighbours with
// row-normalized weights next to the raw (symmetric) Gaussian affinities.
struct AffinityGraph {
  static constexpr int kMaxNeighbors = 8;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> count;                    // neighbours per pixel
  std::vector<std::array<int, kMaxNeighbors>> neighbor;
  std::vector<std::array<double, kMaxNeighbors>> weight;
  std::vector<std::array<double, kMaxNeighbors>> affinity;
  std::vector<double> degree;                          // sum of raw affinities
};

struct SolverConfig {
  double sigma_c = 10.0;  // Lab distance bandwidth
  int max_iters = 20000;
  double tol = 1e-6;      // relative residual
};

// w_ij = exp(-|f(i) - f(j)|^2 / (2 sigma_c^2)) over the 8-neighbourhood,
// normalized per row.
AffinityGraph build_affinity(const LabImage& lab, double sigma_c);

struct ColorizationResult {
  DepthMap depth;
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

// Every unsampled pixel equals the affinity-weighted mean of its neighbours;
// sampled pixels keep their measured depth exactly. Solved with conjugate
// gradients on the symmetric positive-definite graph Laplacian restricted to
// the unknown pixels. Throws ParameterError if there is no valid sample.
ColorizationResult colorization_reconstruct(const LabImage& lab, const DepthMap& sparse,
                                            const SolverConfig& cfg = {});

// Each pixel takes the depth of its nearest valid sample (Euclidean, ties to
// the sample first in scan order).
DepthMap nn_reconstruct(const DepthMap& sparse);

// Joint bilateral average over samples within `radius`; pixels whose
// neighbourhood carries no weight fall back to nn_reconstruct.
DepthMap bilateral_reconstruct(const LabImage& lab, const DepthMap& sparse,
                               double sigma_s, double sigma_c, double radius);

}  // namespace depthsamp
