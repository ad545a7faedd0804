#include "rough/smile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "rough/specfun.hpp"

namespace rough {

std::vector<double> log_moneyness_grid(double lo, double hi, int count) {
  if (count < 1 || !(lo <= hi)) {
    throw std::domain_error("log_moneyness_grid: need count >= 1 and lo <= hi");
  }
  std::vector<double> k(count);
  for (int i = 0; i < count; ++i) {
    k[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  }
  return k;
}

MeanEstimate sample_mean(const std::vector<double>& values) {
  MeanEstimate out;
  const auto n = static_cast<double>(values.size());
  if (values.empty()) {
    return out;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  out.mean = sum / n;
  double ss = 0.0;
  for (double v : values) {
    ss += (v - out.mean) * (v - out.mean);
  }
  out.std_error = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return out;
}

SmileResult smile_from_terminal(const std::vector<double>& terminal, double spot,
                                double maturity, const std::vector<double>& log_moneyness) {
  if (terminal.empty()) {
    throw std::domain_error("smile_from_terminal: no samples");
  }
  SmileResult out;
  out.log_moneyness = log_moneyness;
  out.paths = static_cast<int>(terminal.size());
  std::vector<double> payoff(terminal.size());
  for (double k : log_moneyness) {
    const double strike = spot * std::exp(k);
    for (std::size_t p = 0; p < terminal.size(); ++p) {
      payoff[p] = std::max(terminal[p] - strike, 0.0);
    }
    const MeanEstimate est = sample_mean(payoff);
    const double intrinsic = std::max(spot - strike, 0.0);
    auto vol = [&](double price) {
      return implied_vol(std::clamp(price, intrinsic, spot), spot, strike, maturity);
    };
    const double half = 1.959963984540054 * est.std_error;
    out.prices.push_back(est.mean);
    out.price_se.push_back(est.std_error);
    out.iv.push_back(vol(est.mean));
    out.iv_lo.push_back(vol(est.mean - half));
    out.iv_hi.push_back(vol(est.mean + half));
  }
  return out;
}

void write_mc_smile_csv(std::ostream& out, const SmileResult& smile) {
  out << "k,price,iv,iv_lo,iv_hi\n";
  char buf[160];
  for (std::size_t i = 0; i < smile.log_moneyness.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", smile.log_moneyness[i],
                  smile.prices[i], smile.iv[i], smile.iv_lo[i], smile.iv_hi[i]);
    out << buf;
  }
}

double smile_err(const std::vector<double>& k, const std::vector<double>& iv_ref,
                 const std::vector<double>& iv_hat) {
  constexpr double kLo = -0.5;
  constexpr double kHi = 0.3;
  constexpr double kSlack = 1e-12;
  if (k.size() != iv_ref.size() || k.size() != iv_hat.size() || k.size() < 2) {
    throw GridMismatch("smile_err: curves must share one grid of at least two points");
  }
  if (!std::is_sorted(k.begin(), k.end()) || k.front() > kLo + kSlack || k.back() < kHi - kSlack) {
    throw GridMismatch("smile_err: grid must be increasing and cover [-0.5, 0.3]");
  }
  auto sq = [&](std::size_t i) { return (iv_ref[i] - iv_hat[i]) * (iv_ref[i] - iv_hat[i]); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    const double a = std::max(k[i], kLo);
    const double b = std::min(k[i + 1], kHi);
    if (!(b > a)) {
      continue;
    }
    // The squared difference is interpolated linearly inside each cell.
    const double width = k[i + 1] - k[i];
    auto at = [&](double x) { return sq(i) + (sq(i + 1) - sq(i)) * (x - k[i]) / width; };
    total += 0.5 * (b - a) * (at(a) + at(b));
  }
  return std::sqrt(total);
}

void write_smile_csv(std::ostream& out, const SmileResult& smile) {
  out << "k,price,iv\n";
  char buf[96];
  for (std::size_t i = 0; i < smile.log_moneyness.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", smile.log_moneyness[i], smile.prices[i],
                  smile.iv[i]);
    out << buf;
  }
}

}  // namespace rough
