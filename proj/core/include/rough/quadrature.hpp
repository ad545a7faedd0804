#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace rough {

// Raised when the Jacobi matrix of a weight cannot be built (non-positive
// mass or a vanishing recurrence coefficient). Reduce m or split the interval.
class QuadratureBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// c_H = 1 / (Γ(H+1/2) Γ(1/2-H)).
double fractional_weight_constant(double hurst);

/// Positive weight on (0, ∞): either the fractional weight c_H x^(-H-1/2) or a
/// user callable of type (γ, δ).
class WeightFunction {
 public:
  static WeightFunction fractional(double hurst);
  static WeightFunction general(std::function<double(double)> fn, double gamma, double delta);

  double operator()(double x) const;

  bool is_fractional() const { return fractional_; }
  double hurst() const { return hurst_; }
  double gamma() const { return gamma_; }
  double delta() const { return delta_; }
  // c_H for the fractional kind, 1 otherwise.
  double scale() const { return scale_; }

 private:
  WeightFunction() = default;

  bool fractional_ = false;
  double hurst_ = 0.0;
  double gamma_ = 0.0;
  double delta_ = 0.0;
  double scale_ = 1.0;
  std::function<double(double)> fn_;
};

struct QuadratureRule {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  int level() const { return static_cast<int>(nodes.size()); }
};

/// k-th moment ∫_a^b x^k c_H x^(-H-1/2) dx in closed form.
double fractional_moment(double hurst, double a, double b, int k);

/// Level-m Gaussian rule for w on [a, b], 0 < a < b, 1 <= m <= 32.
///
/// The Jacobi matrix comes from a Lanczos (discretized Stieltjes) pass over a
/// composite Gauss-Legendre discretization of w in log x, with the interval
/// mapped affinely onto [0, 1]; nodes and weights follow from its
/// eigendecomposition. Works for very wide intervals (b/a up to e^200).
QuadratureRule gauss_rule(const WeightFunction& w, double a, double b, int m);

}  // namespace rough
