#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rough/kernel.hpp"
#include "rough/smile.hpp"

namespace rough {

struct RBergomiParams {
  double spot = 1.0;
  double v0 = 0.235 * 0.235;
  double eta = 1.9;
  double rho = -0.9;
  double hurst = 0.07;
  double maturity = 0.9;

  void validate() const;
};

/// ∫_0^t Ĝ(t-s)^2 ds, the variance of Σ w_i Y^{x_i}_t.
double variance_compensator(const ExpKernelApprox& approx, double t);

struct TerminalSample {
  std::vector<double> spot;
  // Sample means of V̄ at t = T/4, T/2 and 3T/4 (rounded to the grid), with
  // their standard errors.
  std::vector<double> variance_times;
  std::vector<double> variance_mean;
  std::vector<double> variance_se;
};

/// Terminal spots under the Markovian scheme with the rule's kernel standing in
/// for t^(H-1/2) / Γ(H+1/2).
TerminalSample simulate_terminal(const RBergomiParams& params, const ExpKernelApprox& approx,
                                 int steps, int paths, std::uint64_t seed, unsigned threads = 1);

/// Terminal spots with the Volterra process sampled exactly at grid times from
/// the joint covariance of (Brownian increments, RL-fBm values). steps <= 1024.
TerminalSample simulate_terminal_reference(const RBergomiParams& params, int steps, int paths,
                                           std::uint64_t seed, unsigned threads = 1);

/// Reference and Markovian schemes driven by one Brownian path: a single joint
/// Cholesky of (ΔW, X, X̂_1, ..., X̂_R) at grid times. Entry 0 is the
/// reference, entry r + 1 uses rules[r]. steps <= 1024.
std::vector<TerminalSample> simulate_terminal_coupled(const RBergomiParams& params,
                                                      const std::vector<ExpKernelApprox>& rules,
                                                      int steps, int paths, std::uint64_t seed,
                                                      unsigned threads = 1);

SmileResult simulate_smile(const RBergomiParams& params, const ExpKernelApprox& approx, int steps,
                           int paths, const std::vector<double>& log_moneyness,
                           std::uint64_t seed, unsigned threads = 1);

SmileResult reference_smile(const RBergomiParams& params, int steps, int paths,
                            const std::vector<double>& log_moneyness, std::uint64_t seed,
                            unsigned threads = 1);

}  // namespace rough
