#pragma once

#include <cstddef>

#include "depthsamp/imagedata.hpp"

namespace depthsamp {

struct ErrorStats {
  double mae = 0.0;   // mm
  double rmse = 0.0;  // mm
  std::size_t pixels = 0;
};

// Errors over pixels valid in the ground truth; the estimate is read there
// only. Throws ParameterError on dimension mismatch or when no ground-truth
// pixel is valid.
ErrorStats evaluate(const DepthMap& estimate, const DepthMap& truth);
double mae(const DepthMap& estimate, const DepthMap& truth);
double rmse(const DepthMap& estimate, const DepthMap& truth);

}  // namespace depthsamp
