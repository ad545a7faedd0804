#include "rough/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace rough {
namespace {

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_gamma(double x) {
  if (x < 0.5) {
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
  }
  x -= 1.0;
  double acc = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) {
    acc += kLanczos[i] / (x + static_cast<double>(i));
  }
  const double t = x + 7.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * acc;
}

template <std::floating_point Real>
Real complete_gamma(Real s) {
  if constexpr (std::is_same_v<Real, double>) {
    return gamma_fn(s);
  } else {
    return std::tgamma(s);
  }
}

template <std::floating_point Real>
Real gamma_series(Real s, Real x) {
  constexpr Real eps = std::numeric_limits<Real>::epsilon();
  Real term = Real(1) / s;
  Real sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (s + Real(n));
    sum += term;
    if (std::abs(term) < std::abs(sum) * eps) {
      break;
    }
  }
  return sum * std::exp(s * std::log(x) - x);
}

// Upper incomplete gamma Γ(s, x) by modified Lentz on the Legendre fraction.
template <std::floating_point Real>
Real gamma_continued_fraction(Real s, Real x) {
  constexpr Real eps = std::numeric_limits<Real>::epsilon();
  constexpr Real tiny = std::numeric_limits<Real>::min() / eps;
  Real b = x + Real(1) - s;
  Real c = Real(1) / tiny;
  Real d = Real(1) / b;
  Real h = d;
  for (int i = 1; i < 100000; ++i) {
    const Real an = -Real(i) * (Real(i) - s);
    b += Real(2);
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = Real(1) / d;
    const Real delta = d * c;
    h *= delta;
    if (std::abs(delta - Real(1)) < eps) {
      break;
    }
  }
  return std::exp(s * std::log(x) - x) * h;
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("gamma_fn: argument must be positive, got " + std::to_string(x));
  }
  return lanczos_gamma(x);
}

template <std::floating_point Real>
Real lower_incomplete_gamma(Real s, Real x) {
  if (!(s > Real(0)) || !(x >= Real(0))) {
    throw std::domain_error("lower_incomplete_gamma: need s > 0 and x >= 0");
  }
  if (x == Real(0)) {
    return Real(0);
  }
  if (std::isinf(x)) {
    return complete_gamma(s);
  }
  if (x < s + Real(1)) {
    return gamma_series(s, x);
  }
  return complete_gamma(s) - gamma_continued_fraction(s, x);
}

template double lower_incomplete_gamma<double>(double, double);
template long double lower_incomplete_gamma<long double>(long double, long double);

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bs_call(double spot, double strike, double vol_total) {
  if (!(spot > 0.0) || !(strike > 0.0)) {
    throw std::domain_error("bs_call: spot and strike must be positive");
  }
  if (!(vol_total >= 0.0)) {
    throw std::domain_error("bs_call: total volatility must be nonnegative");
  }
  if (vol_total == 0.0) {
    return std::max(spot - strike, 0.0);
  }
  const double d1 = std::log(spot / strike) / vol_total + 0.5 * vol_total;
  const double d2 = d1 - vol_total;
  return spot * normal_cdf(d1) - strike * normal_cdf(d2);
}

double implied_vol(double price, double spot, double strike, double maturity) {
  if (!(spot > 0.0) || !(strike > 0.0) || !(maturity > 0.0)) {
    throw std::domain_error("implied_vol: spot, strike and maturity must be positive");
  }
  const double intrinsic = std::max(spot - strike, 0.0);
  const double slack = 1e-12 * spot;
  if (!(price >= intrinsic - slack) || !(price <= spot + slack)) {
    throw NoSolutionError("implied_vol: price " + std::to_string(price) +
                          " violates arbitrage bounds");
  }
  constexpr double kLo = 1e-8;
  constexpr double kHi = 10.0;
  const double sqrt_t = std::sqrt(maturity);
  auto objective = [&](double sigma) { return bs_call(spot, strike, sigma * sqrt_t) - price; };

  double lo = kLo;
  double hi = kHi;
  // Within rounding of the lower edge (1 - 0.9 != 0.1 in binary, say).
  const double f_lo = objective(lo);
  if (f_lo >= -1e-15 * spot) {
    return lo;
  }
  if (objective(hi) <= 0.0) {
    return hi;
  }

  // Start at the Brenner-Subrahmanyam style guess when it lands inside the bracket.
  double sigma = std::sqrt(2.0 * std::abs(std::log(spot / strike)) / maturity);
  if (!(sigma > lo && sigma < hi)) {
    sigma = 0.5;
  }
  for (int iter = 0; iter < 300; ++iter) {
    const double f = objective(sigma);
    if (f == 0.0) {
      return sigma;
    }
    if (f < 0.0) {
      lo = sigma;
    } else {
      hi = sigma;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      break;
    }
    const double d1 = std::log(spot / strike) / (sigma * sqrt_t) + 0.5 * sigma * sqrt_t;
    const double vega = spot * sqrt_t * std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * std::numbers::pi);
    double next = vega > 0.0 ? sigma - f / vega : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    if (std::abs(next - sigma) <= 1e-15 * sigma && std::abs(f) <= 1e-14 * spot) {
      return next;
    }
    sigma = next;
  }
  return sigma;
}

}  // namespace rough
