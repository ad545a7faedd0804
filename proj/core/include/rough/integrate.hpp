#pragma once

#include <functional>

namespace rough {

struct IntegrationResult {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Globally adaptive 15-point Gauss-Kronrod on a finite interval. Bisects the
// panel with the largest error estimate until the total estimate drops below
// max(abs_tol, rel_tol * |value|) or max_panels is reached.
IntegrationResult integrate_gk15(const std::function<double(double)>& f, double lo, double hi,
                                 double abs_tol = 1e-12, double rel_tol = 1e-12,
                                 int max_panels = 2000);

}  // namespace rough
