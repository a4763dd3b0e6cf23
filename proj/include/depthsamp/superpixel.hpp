#pragma once

// SLIC superpixels over (L, a, b, x, y), soft pixel-to-superpixel
// association, the SLIC reconstruction loss and superpixel mass centers.
// The superpixel-center ("SPS") sampler is built on top of these.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "depthsamp/imagedata.hpp"

namespace depthsamp {

struct SuperpixelSeed {
  Lab color;
  Point2 position;
};

struct Segmentation {
  int width = 0;
  int height = 0;
  // Superpixel id per pixel, row-major, dense in [0, seeds.size()).
  std::vector<int> labels;
  std::vector<SuperpixelSeed> seeds;
  // Nominal seed spacing S = sqrt(H*W / N_s).
  double step = 1.0;

  int label(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t num_superpixels() const { return seeds.size(); }
};

// Per-pixel association weights over a small set of nearby superpixels.
// Pixel i owns slots [i*slots, (i+1)*slots) of ids / weights.
struct SoftAssociation {
  int width = 0;
  int height = 0;
  std::size_t num_superpixels = 0;
  int slots = 0;
  std::vector<int> ids;
  std::vector<double> weights;

  std::span<const int> ids_of(std::size_t pixel) const {
    return {ids.data() + pixel * slots, static_cast<std::size_t>(slots)};
  }
  std::span<const double> weights_of(std::size_t pixel) const {
    return {weights.data() + pixel * slots, static_cast<std::size_t>(slots)};
  }
};

struct SuperpixelSummary {
  std::vector<Lab> color;        // u_s
  std::vector<Point2> location;  // l_s
  std::vector<double> mass;      // sum of association weights
  std::vector<std::size_t> members;  // pixels with non-zero association
};

// Combined SLIC distance ||f(p) - u_s|| + m * ||c(p) - l_s|| / S.
double slic_distance(const Lab& color, double x, double y,
                     const SuperpixelSeed& seed, double m, double step);

// Seeds on a lattice of round(sqrt(N*H/W)) rows with the N seeds spread as
// evenly as possible over the rows, each nudged to the lowest Lab gradient
// in its 3x3 neighborhood; pixels labeled by nearest seed.
Segmentation slic_init(const LabImage& lab, std::size_t count, double m = 1.0);

// Localized k-means: each pixel picks the closest seed among those whose
// 2S x 2S window covers it, seeds move to member means. Connectivity is
// enforced after the last iteration. on_iteration, if set, observes the
// segmentation after every seed update.
Segmentation slic_iterate(
    Segmentation seg, const LabImage& lab, double m, int iters,
    const std::function<void(const Segmentation&)>& on_iteration = {});

// Relabels every non-principal 4-connected fragment of a label to its
// largest neighbouring superpixel, then refreshes seed means.
void enforce_connectivity(Segmentation& seg, const LabImage& lab);

// Sum over pixels of the distance to the closest seed, searching all seeds.
double slic_objective(const Segmentation& seg, const LabImage& lab, double m);

// q_s(p) proportional to exp(-d(p, s) / tau) over the pixel's own superpixel
// plus its 8 spatially nearest other seeds (all seeds if fewer than 9).
SoftAssociation soft_association(const Segmentation& seg, const LabImage& lab,
                                 double m, double tau);

// One slot per pixel with weight 1 on its label.
SoftAssociation hard_association(const Segmentation& seg);

// Association-weighted color and location per superpixel. A superpixel with
// no mass keeps the matching fallback location (pass the seeds it came from).
SuperpixelSummary centers(const SoftAssociation& q, const LabImage& lab,
                          const std::vector<SuperpixelSeed>& fallback);
SuperpixelSummary centers(const Segmentation& seg, const LabImage& lab);

// sum_p ||f(p) - f'(p)|| + m ||c(p) - c'(p)|| with f', c' reconstructed from
// the association-weighted superpixel colors and locations.
double slic_loss(const SoftAssociation& q, const LabImage& lab, double m);

struct SpsParams {
  double m = 1.0;
  int iters = 10;
};

struct SpsResult {
  SampleSet samples;
  Segmentation segmentation;
};

// One sample per superpixel at its mass center, snapped to the nearest member
// pixel when the center falls outside the superpixel.
SpsResult sps_run(const RgbImage& img, std::size_t count, const SpsParams& params = {});
SampleSet sps_sample(const RgbImage& img, std::size_t count, const SpsParams& params = {});

}  // namespace depthsamp
