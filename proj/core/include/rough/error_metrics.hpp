#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "rough/kernel.hpp"

namespace rough {

enum class ErrorMethod { exact, numeric };

struct ErrorReport {
  double l2_error = 0.0;
  double l2_error_sq = 0.0;
  ErrorMethod method = ErrorMethod::exact;
  double horizon = 1.0;
  // False when the numeric quadrature missed its tolerance.
  bool converged = true;
};

/// ∫_0^T (G(t) - Ĝ(t))^2 dt in closed form, evaluated in extended precision
/// with compensated sums. Needs x_0 = 0 and x_i > 0 for i >= 1.
ErrorReport l2_error_exact(const ExpKernelApprox& approx, double hurst, double horizon);
inline ErrorReport l2_error_exact(const ExpKernelApprox& approx, double horizon) {
  return l2_error_exact(approx, approx.hurst, horizon);
}

/// The same integral by adaptive quadrature in log t.
ErrorReport l2_error_numeric(const ExpKernelApprox& approx, double hurst, double horizon);
inline ErrorReport l2_error_numeric(const ExpKernelApprox& approx, double horizon) {
  return l2_error_numeric(approx, approx.hurst, horizon);
}

// Bounds on E|X_T - X̂_T|^2 (squared scale). C is the Lipschitz constant of the
// Volterra equation; C = 1 for fractional Brownian motion.
double bound_thm31(double hurst, int nodes, double horizon, double lipschitz = 1.0);
double bound_thm33(double hurst, int nodes, double horizon, double lipschitz = 1.0,
                   bool corollary_digits = false);

/// Pointwise bound on |c_H ∫_a^b e^(-tx) x^(-H-1/2) dx - Σ w_i e^(-t x_i)| for a
/// level-m Gaussian rule on [a, b].
double bound_single_interval(double hurst, double a, double b, int m, double t);

struct OptimizationResult {
  int nodes = 1;
  int m = 1;
  int n = 1;
  double log_xi0 = 0.0;
  double log_xin = 0.0;
  double l2_error = 0.0;
  int evaluations = 0;
  bool converged = false;

  GeometricLayout layout() const { return {m, n, log_xi0, log_xin}; }
};

struct OptimizeOptions {
  int max_evaluations = 2000;
  double tolerance = 1e-6;
  unsigned threads = 1;
};

/// Minimizes the exact error with optimal w_0 over (log xi_0, log xi_n) for
/// fixed m, from several deterministic starting points.
OptimizationResult optimize_xi(double hurst, double horizon, int nodes, int m,
                               const OptimizeOptions& options = {});

/// Best optimize_xi over m = 1 .. min(m_max, N).
OptimizationResult optimize_full(double hurst, double horizon, int nodes, int m_max = 10,
                                 const OptimizeOptions& options = {});

/// Rebuilds the optimized rule with its optimal w_0.
ExpKernelApprox optimized_rule(double hurst, double horizon, const OptimizationResult& result);

class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FitPoint {
  double hurst;
  int nodes;
  OptimizationResult optimum;
  double alpha_from_xi0;
  double alpha_from_xin;
  double alpha_from_error;
  double beta;
};

// log C = intercept + slope_h * H + slope_log_n * log N
struct LogLinearFit {
  double intercept = 0.0;
  double slope_h = 0.0;
  double slope_log_n = 0.0;
};

struct FitReport {
  std::vector<FitPoint> points;
  // Median of alpha_limits.
  double alpha_hat = 0.0;
  // Per (H, source) limits of the per-point alphas, fitted as c0 + c1 / sqrt(N)
  // over the larger-N half; sources ordered xi_0, xi_n, error within each H.
  std::vector<double> alpha_limits;
  double beta_hat = 0.0;
  // Medians of the raw per-point estimates over the larger-N half.
  double alpha_from_xi0 = 0.0;
  double alpha_from_xin = 0.0;
  double alpha_from_error = 0.0;
  LogLinearFit xi0_factor;
  LogLinearFit xin_factor;
  LogLinearFit error_factor;
};

/// Optimizes every grid point, inverts the geometric ansatz for per-point
/// (alpha, beta) estimates and summarizes them over the larger-N half of the
/// grid, then regresses the log prefactors on (1, H, log N).
FitReport fit_learned_constants(const std::vector<double>& hurst_grid,
                                const std::vector<int>& node_grid, double horizon = 1.0,
                                const OptimizeOptions& options = {});

struct ErrorTableRow {
  double hurst;
  int nodes;
  RuleKind rule;
  int m;
  int n;
  double log_xi0;
  double log_xin;
  double l2_error;
};

ErrorTableRow make_error_row(const ExpKernelApprox& approx, double horizon);

/// Header `H,N,rule,m,n,log_xi0,log_xin,l2_error`.
void write_error_table_csv(std::ostream& out, const std::vector<ErrorTableRow>& rows);
void write_fit_csv(std::ostream& out, const FitReport& report);

}  // namespace rough
