#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "rough/kernel.hpp"

namespace rough {

class NonPsdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lower Cholesky factor of a covariance matrix. The factorization runs on the
// correlation matrix; if it fails, a diagonal jitter of at most 1e-14 times
// the trace is added before giving up with NonPsdError.
struct CholeskyResult {
  Eigen::MatrixXd factor;
  double jitter = 0.0;
};

CholeskyResult jittered_cholesky(const Eigen::MatrixXd& cov);

/// Covariance of (W_{t+Δ} - W_t, ∫_t^{t+Δ} e^{-x_i (t+Δ-s)} dW_s for each node).
/// Index 0 is the Brownian increment, index i + 1 is node i.
struct StepCovariance {
  std::vector<double> nodes;
  double dt = 0.0;
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd cholesky;
  double jitter = 0.0;
};

StepCovariance step_covariance(const std::vector<double>& nodes, double dt);

// (1 - e^{-xΔ}) / x, equal to Δ at x = 0.
double decay_integral(double x, double dt);

/// ∫_0^t Ĝ(s)^2 ds = Σ_ij w_i w_j (1 - e^{-(x_i+x_j) t}) / (x_i + x_j).
/// This is Var(X̂_t) for the Markovian process.
double squared_kernel_integral(const ExpKernelApprox& approx, double t);

struct FbmPaths {
  std::vector<double> times;
  int paths = 0;
  // Row-major, paths x times.size(); column 0 is zero.
  std::vector<double> values;

  double at(int path, int step) const { return values[static_cast<std::size_t>(path) * times.size() + step]; }
};

/// Samples X̂ = Σ w_i Y^{x_i} on a uniform grid; exact in law at grid times.
FbmPaths simulate_fbm_paths(const ExpKernelApprox& approx, double horizon, int steps, int paths,
                            std::uint64_t seed, unsigned threads = 1);

/// Header `path,t,xhat`.
void write_paths_csv(std::ostream& out, const FbmPaths& paths);

/// Cov(X_t, X_s) for X_t = ∫_0^t G(t-u) dW_u.
double rl_fbm_covariance(double hurst, double t, double s);

/// Cov(X_t, W_b - W_a) for X_t = ∫_0^t G(t-u) dW_u.
double rl_fbm_increment_covariance(double hurst, double t, double a, double b);

struct CoupledErrorResult {
  double mean_square = 0.0;
  double std_error = 0.0;
  double exact = 0.0;
  int paths = 0;
};

/// Simulates X_T and X̂_T from the same Brownian path and reports the sample
/// mean of |X_T - X̂_T|^2 together with ∫_0^T (G - Ĝ)^2.
///
/// Each step draws (ΔW, factor innovations, ∫_{t_j}^{t_{j+1}} G(T-s) dW_s)
/// jointly, so X_T is exact and not a discretization of the convolution.
CoupledErrorResult simulate_coupled_error(const ExpKernelApprox& approx, double horizon,
                                          int steps, int paths, std::uint64_t seed,
                                          unsigned threads = 1);

}  // namespace rough
