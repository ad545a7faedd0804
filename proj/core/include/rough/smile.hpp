#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace rough {

struct SmileResult {
  std::vector<double> log_moneyness;
  std::vector<double> prices;
  std::vector<double> iv;
  // 95% confidence bounds; equal to iv for deterministic engines.
  std::vector<double> iv_lo;
  std::vector<double> iv_hi;
  std::vector<double> price_se;
  int paths = 0;
  int steps = 0;
  std::uint64_t seed = 0;
};

/// Uniform log-moneyness grid with `count` points on [lo, hi].
std::vector<double> log_moneyness_grid(double lo, double hi, int count);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanEstimate sample_mean(const std::vector<double>& values);

/// Plain Monte Carlo call prices with CLT intervals and implied vols.
SmileResult smile_from_terminal(const std::vector<double>& terminal, double spot,
                                double maturity, const std::vector<double>& log_moneyness);

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (∫_{-0.5}^{0.3} |σ(k) - σ̂(k)|^2 dk)^(1/2) by the trapezoid rule. Both
/// curves live on the same grid, which must cover [-0.5, 0.3]; only the part
/// inside that window counts.
double smile_err(const std::vector<double>& k, const std::vector<double>& iv_ref,
                 const std::vector<double>& iv_hat);

/// Header `k,price,iv,iv_lo,iv_hi`.
void write_mc_smile_csv(std::ostream& out, const SmileResult& smile);

/// Header `k,price,iv`.
void write_smile_csv(std::ostream& out, const SmileResult& smile);

}  // namespace rough
