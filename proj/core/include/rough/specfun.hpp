#pragma once

#include <concepts>
#include <stdexcept>

namespace rough {

// Thrown by implied_vol when a price lies outside the no-arbitrage band.
class NoSolutionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Gamma function for x > 0 (Lanczos, g = 7, with reflection below 1/2).
double gamma_fn(double x);

/// Lower incomplete gamma γ(s, x) = ∫₀ˣ t^(s-1) e^(-t) dt.
///
/// Series expansion for x < s + 1, Legendre continued fraction otherwise.
/// Instantiated for double and long double; the long double path is used
/// where the closed-form kernel error cancels to well below double epsilon.
template <std::floating_point Real>
Real lower_incomplete_gamma(Real s, Real x);

extern template double lower_incomplete_gamma<double>(double, double);
extern template long double lower_incomplete_gamma<long double>(long double, long double);

/// Standard normal cumulative distribution function.
double normal_cdf(double x);

/// Undiscounted Black-Scholes call price with total volatility σ√T.
double bs_call(double spot, double strike, double vol_total);

/// Black-Scholes implied volatility, zero rates.
///
/// Newton iterations safeguarded by bisection on [1e-8, 10]. Prices below the
/// bracket return the lower edge and prices above it saturate at 10; prices
/// outside [max(S-K, 0), S] throw NoSolutionError.
double implied_vol(double price, double spot, double strike, double maturity);

}  // namespace rough
