#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rough {

struct NelderMeadOptions {
  double initial_step = 1.0;
  // Stop once every vertex lies within this distance of the best one.
  double tolerance = 1e-6;
  int max_evaluations = 2000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Downhill simplex with the standard coefficients (1, 2, 1/2, 1/2). The
// objective may return +inf to reject a point.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace rough
