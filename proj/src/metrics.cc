#include "depthsamp/metrics.hpp"

#include <cmath>

#include "depthsamp/errors.hpp"

namespace depthsamp {

ErrorStats evaluate(const DepthMap& estimate, const DepthMap& truth) {
  if (estimate.width() != truth.width() || estimate.height() != truth.height()) {
    throw ParameterError("estimate and ground truth dimensions differ");
  }
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!truth.valid(i)) continue;
    const double e = estimate.depth(i) - truth.depth(i);
    abs_sum += std::abs(e);
    sq_sum += e * e;
    ++n;
  }
  if (n == 0) throw ParameterError("ground truth has no valid pixel");
  return {abs_sum / n, std::sqrt(sq_sum / n), n};
}

double mae(const DepthMap& estimate, const DepthMap& truth) {
  return evaluate(estimate, truth).mae;
}

double rmse(const DepthMap& estimate, const DepthMap& truth) {
  return evaluate(estimate, truth).rmse;
}

}  // namespace depthsamp
