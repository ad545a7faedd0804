#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rough/quadrature.hpp"

namespace rough {

inline constexpr double kTheoremAlpha = 1.06418;
inline constexpr double kTheoremBeta = 0.4275;
inline constexpr double kLearnedAlpha = 1.8;
inline constexpr double kLearnedBeta = 0.9;

/// The kernel G(t) = t^(H-1/2) / Γ(H+1/2), H in [0.01, 0.49].
class FractionalKernel {
 public:
  explicit FractionalKernel(double hurst);

  double hurst() const { return hurst_; }
  double c_h() const { return c_h_; }
  // A = (1/H + 1/(3/2-H))^(1/2)
  double rate_constant() const { return rate_constant_; }

  double operator()(double t) const;

 private:
  double hurst_;
  double c_h_;
  double rate_constant_;
  double inv_gamma_;
};

double rate_constant(double hurst);

enum class RoundingMode { up, nearest };
enum class RuleKind { thm31, thm33, learned, optimized, custom };
enum class W0Rule { riemann, optimal };

std::string_view to_string(RuleKind kind);
RuleKind parse_rule_kind(std::string_view name);

// (H, N, alpha, beta, a, b): level-m Gaussian rules on n geometric intervals
// between xi_0 = a exp(-alpha sqrt(N) / ((3/2-H) A)) and
// xi_n = b exp(alpha sqrt(N) / (H A)).
struct GeometricRuleParams {
  double hurst = 0.1;
  int nodes = 1;
  double alpha = kTheoremAlpha;
  double beta = kTheoremBeta;
  double a = 1.0;
  double b = 1.0;
  RoundingMode rounding = RoundingMode::up;
};

struct GeometricLayout {
  int m = 1;
  int n = 1;
  double log_xi0 = 0.0;
  double log_xin = 0.0;
};

GeometricLayout derive_layout(const GeometricRuleParams& params);

// n = round(N / m), at least 1.
int intervals_for(int requested_nodes, int m);

/// Sum of exponentials sum_i w_i exp(-x_i t) with x_0 = 0 and increasing nodes.
struct ExpKernelApprox {
  double hurst = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
  RuleKind kind = RuleKind::custom;
  int requested_nodes = 0;
  int m = 0;
  int n = 0;
  double log_xi0 = 0.0;
  double log_xin = 0.0;

  std::size_t size() const { return nodes.size(); }
};

/// Geometric Gaussian rule with the Riemann weight at the zero node,
/// w_0 = c_H xi_0^(1/2-H) / (1/2-H).
ExpKernelApprox geometric_gaussian_rule(const GeometricRuleParams& params);

/// Same construction from an explicit layout (m, n, log xi_0, log xi_n).
ExpKernelApprox geometric_rule_from_layout(double hurst, int requested_nodes,
                                           const GeometricLayout& layout);

ExpKernelApprox thm31_rule(double hurst, int nodes, W0Rule w0 = W0Rule::riemann);

struct Thm33Options {
  // Round the coefficients of the expansions in N (m, xi_0, xi_n) to four
  // decimals before evaluating them.
  bool corollary_digits = false;
  // The closed-form a and b are only stated for N >= 2.
  bool enforce_min_nodes = true;
  W0Rule w0 = W0Rule::riemann;
};

ExpKernelApprox thm33_rule(double hurst, int nodes, double horizon, const Thm33Options& options = {});

/// Geometric rule with the fitted constants alpha = 1.8, beta = 0.9, m rounded
/// to nearest and the optimal w_0 by default.
ExpKernelApprox learned_rule(double hurst, int nodes, double horizon,
                             W0Rule w0 = W0Rule::optimal);

/// Predicted L2 error of learned_rule: T^H exp(0.065 H^-1.1) exp(-1.8 sqrt(N) / A).
double learned_error_prediction(double hurst, int nodes, double horizon);

/// Geometric rule for a general kernel with weight of type (γ, δ).
ExpKernelApprox general_kernel_rule(const WeightFunction& w, int nodes);

// Expansions of the closed-form rule at T = 1 in terms of N:
//   m ~ m_coef sqrt(N), n ~ n_coef sqrt(N),
//   xi_0 = xi0_factor N^xi0_power exp(-xi0_rate sqrt(N)),
//   xi_n = xin_factor N^xin_power exp(xin_rate sqrt(N)),
//   squared error bound = bound_factor N^bound_power exp(-bound_rate sqrt(N)).
struct Thm33Coefficients {
  double m_coef;
  double n_coef;
  double xi0_factor;
  double xi0_power;
  double xi0_rate;
  double xin_factor;
  double xin_power;
  double xin_rate;
  double bound_factor;
  double bound_power;
  double bound_rate;
};

Thm33Coefficients thm33_coefficients(double hurst);

double round_decimals(double value, int digits);

/// Vertex of the quadratic error in w_0 over [0, T].
double w0_optimal(const ExpKernelApprox& approx, double horizon);

ExpKernelApprox with_w0(ExpKernelApprox approx, double w0);

double eval_hat_g(const ExpKernelApprox& approx, double t);
double eval_g(const FractionalKernel& kernel, double t);

/// CSV with header `i,x,w`, 17 significant digits.
void write_nodes_csv(std::ostream& out, const ExpKernelApprox& approx);

}  // namespace rough
