#include "rough/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "rough/integrate.hpp"
#include "rough/specfun.hpp"

namespace rough {
namespace {

void check_hurst(double hurst) {
  if (!(hurst >= 0.01 && hurst <= 0.49)) {
    throw std::domain_error("Hurst parameter must lie in [0.01, 0.49], got " +
                            std::to_string(hurst));
  }
}

void check_nodes(int nodes) {
  if (nodes < 1) {
    throw std::domain_error("number of nodes must be positive");
  }
}

void check_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::domain_error("horizon T must be positive");
  }
}

int round_level(double raw, RoundingMode mode) {
  const double level = mode == RoundingMode::up ? std::ceil(raw) : std::round(raw);
  return std::max(1, static_cast<int>(level));
}

double riemann_w0(double hurst, double log_xi0) {
  return fractional_weight_constant(hurst) / (0.5 - hurst) * std::exp((0.5 - hurst) * log_xi0);
}

// log a and log b of the closed-form rule at T = 1.
struct ClosedFormScales {
  double log_a;
  double log_b;
};

ClosedFormScales thm33_scales(double hurst, double nodes) {
  const double big_a = rate_constant(hurst);
  const double e = std::exp(kTheoremAlpha * kTheoremBeta);
  const double q = e / (8.0 * (e - 1.0));
  const double gamma = 1.0 / (3.0 * q + 6.0 * hurst - 4.0 * hurst * hurst);
  const double pi3 = std::pow(std::numbers::pi, 3);
  const double ratio = std::pow(big_a, 2.0 - 2.0 * hurst) / std::pow(kTheoremBeta, 2.0 - 2.0 * hurst);
  const double n_pow = (1.0 - hurst) * std::log(nodes);
  const double lead = q * std::log((9.0 - 6.0 * hurst) / (2.0 * hurst));
  const double k_a = std::log(5.0 * pi3 / 768.0 * e * (e - 1.0) * ratio * (3.0 - 2.0 * hurst) / hurst);
  const double k_b = std::log(5.0 * pi3 / 1152.0 * e * (e - 1.0) * ratio);
  return {gamma * (lead + 2.0 * hurst * (k_a + n_pow)),
          gamma * (lead + (2.0 * hurst - 3.0) * (k_b + n_pow))};
}

// Gauss rules on the n geometric intervals. For the fractional weight all
// intervals are scaled copies of [1, r], r = xi_{i+1} / xi_i.
void append_interval_rules(const WeightFunction& w, const GeometricLayout& layout,
                           ExpKernelApprox& approx) {
  const double log_ratio = (layout.log_xin - layout.log_xi0) / layout.n;
  if (!(log_ratio > 0.0)) {
    throw std::domain_error("geometric rule: need xi_0 < xi_n");
  }
  if (w.is_fractional()) {
    const QuadratureRule base = gauss_rule(w, 1.0, std::exp(log_ratio), layout.m);
    const double power = 0.5 - w.hurst();
    for (int i = 0; i < layout.n; ++i) {
      const double log_lo = layout.log_xi0 + i * log_ratio;
      const double scale = std::exp(log_lo);
      const double weight_scale = std::exp(power * log_lo);
      for (int j = 0; j < layout.m; ++j) {
        approx.nodes.push_back(scale * base.nodes[j]);
        approx.weights.push_back(weight_scale * base.weights[j]);
      }
    }
    return;
  }
  for (int i = 0; i < layout.n; ++i) {
    const double lo = std::exp(layout.log_xi0 + i * log_ratio);
    const double hi = std::exp(layout.log_xi0 + (i + 1) * log_ratio);
    const QuadratureRule rule = gauss_rule(w, lo, hi, layout.m);
    approx.nodes.insert(approx.nodes.end(), rule.nodes.begin(), rule.nodes.end());
    approx.weights.insert(approx.weights.end(), rule.weights.begin(), rule.weights.end());
  }
}

}  // namespace

double rate_constant(double hurst) { return std::sqrt(1.0 / hurst + 1.0 / (1.5 - hurst)); }

FractionalKernel::FractionalKernel(double hurst)
    : hurst_(hurst),
      c_h_(0.0),
      rate_constant_(0.0),
      inv_gamma_(0.0) {
  check_hurst(hurst);
  c_h_ = fractional_weight_constant(hurst);
  rate_constant_ = ::rough::rate_constant(hurst);
  inv_gamma_ = 1.0 / gamma_fn(hurst + 0.5);
}

double FractionalKernel::operator()(double t) const {
  return std::pow(t, hurst_ - 0.5) * inv_gamma_;
}

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::thm31:
      return "thm31";
    case RuleKind::thm33:
      return "thm33";
    case RuleKind::learned:
      return "learned";
    case RuleKind::optimized:
      return "optimized";
    case RuleKind::custom:
      return "custom";
  }
  return "custom";
}

RuleKind parse_rule_kind(std::string_view name) {
  for (RuleKind kind : {RuleKind::thm31, RuleKind::thm33, RuleKind::learned, RuleKind::optimized,
                        RuleKind::custom}) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  throw std::invalid_argument("unknown rule '" + std::string(name) + "'");
}

int intervals_for(int requested_nodes, int m) {
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(requested_nodes) / m)));
}

GeometricLayout derive_layout(const GeometricRuleParams& params) {
  check_hurst(params.hurst);
  check_nodes(params.nodes);
  if (!(params.alpha > 0.0) || !(params.beta > 0.0) || !(params.a > 0.0) || !(params.b > 0.0)) {
    throw std::domain_error("geometric rule: alpha, beta, a, b must be positive");
  }
  const double big_a = rate_constant(params.hurst);
  const double root_n = std::sqrt(static_cast<double>(params.nodes));
  GeometricLayout layout;
  layout.m = round_level(params.beta / big_a * root_n, params.rounding);
  layout.n = intervals_for(params.nodes, layout.m);
  layout.log_xi0 = std::log(params.a) - params.alpha * root_n / ((1.5 - params.hurst) * big_a);
  layout.log_xin = std::log(params.b) + params.alpha * root_n / (params.hurst * big_a);
  return layout;
}

ExpKernelApprox geometric_rule_from_layout(double hurst, int requested_nodes,
                                           const GeometricLayout& layout) {
  check_hurst(hurst);
  if (layout.m < 1 || layout.n < 1) {
    throw std::domain_error("geometric rule: m and n must be positive");
  }
  ExpKernelApprox approx;
  approx.hurst = hurst;
  approx.requested_nodes = requested_nodes;
  approx.m = layout.m;
  approx.n = layout.n;
  approx.log_xi0 = layout.log_xi0;
  approx.log_xin = layout.log_xin;
  approx.nodes.reserve(1 + static_cast<std::size_t>(layout.n) * layout.m);
  approx.weights.reserve(approx.nodes.capacity());
  approx.nodes.push_back(0.0);
  approx.weights.push_back(riemann_w0(hurst, layout.log_xi0));
  append_interval_rules(WeightFunction::fractional(hurst), layout, approx);
  return approx;
}

ExpKernelApprox geometric_gaussian_rule(const GeometricRuleParams& params) {
  return geometric_rule_from_layout(params.hurst, params.nodes, derive_layout(params));
}

ExpKernelApprox thm31_rule(double hurst, int nodes, W0Rule w0) {
  GeometricRuleParams params;
  params.hurst = hurst;
  params.nodes = nodes;
  ExpKernelApprox approx = geometric_gaussian_rule(params);
  approx.kind = RuleKind::thm31;
  if (w0 == W0Rule::optimal) {
    approx.weights[0] = w0_optimal(approx, 1.0);
  }
  return approx;
}

double round_decimals(double value, int digits) {
  if (!std::isfinite(value)) {
    return value;
  }
  const double scale = std::pow(10.0, digits);
  return std::round(value * scale) / scale;
}

Thm33Coefficients thm33_coefficients(double hurst) {
  check_hurst(hurst);
  const double big_a = rate_constant(hurst);
  const double e = std::exp(kTheoremAlpha * kTheoremBeta);
  const double q = e / (8.0 * (e - 1.0));
  const double gamma = 1.0 / (3.0 * q + 6.0 * hurst - 4.0 * hurst * hurst);
  const ClosedFormScales at_one = thm33_scales(hurst, 1.0);
  const double c_h = fractional_weight_constant(hurst);
  const double pi3 = std::pow(std::numbers::pi, 3);
  const double ratio = std::pow(big_a, 2.0 - 2.0 * hurst) / std::pow(kTheoremBeta, 2.0 - 2.0 * hurst);
  const double poly = 6.0 * hurst - 4.0 * hurst * hurst;
  const double log_inner = e * (3.0 - 2.0 * hurst) / (8.0 * (e - 1.0)) * std::log(3.0 / hurst) +
                           poly * std::log(5.0 * pi3 / 384.0 * e * (e - 1.0) * ratio / hurst) -
                           e * hurst / (4.0 * (e - 1.0)) * std::log(1.5 - hurst);
  const double front = 1.0 / (2.0 * hurst) + 8.0 * (e - 1.0) / e + 1.0 / (3.0 - 2.0 * hurst);

  Thm33Coefficients c{};
  c.m_coef = kTheoremBeta / big_a;
  c.n_coef = big_a / kTheoremBeta;
  c.xi0_factor = std::exp(at_one.log_a);
  c.xi0_power = 2.0 * hurst * (1.0 - hurst) * gamma;
  c.xi0_rate = kTheoremAlpha / ((1.5 - hurst) * big_a);
  c.xin_factor = std::exp(at_one.log_b);
  c.xin_power = (2.0 * hurst - 3.0) * (1.0 - hurst) * gamma;
  c.xin_rate = kTheoremAlpha / (hurst * big_a);
  c.bound_factor = c_h * c_h * front * std::exp(gamma * log_inner);
  c.bound_power = (1.0 - hurst) * poly * gamma;
  c.bound_rate = 2.0 * kTheoremAlpha / big_a;
  return c;
}

ExpKernelApprox thm33_rule(double hurst, int nodes, double horizon, const Thm33Options& options) {
  check_hurst(hurst);
  check_horizon(horizon);
  check_nodes(nodes);
  if (options.enforce_min_nodes && nodes < 2) {
    throw std::domain_error("thm33_rule: requires N >= 2");
  }
  const double root_n = std::sqrt(static_cast<double>(nodes));
  const double log_n = std::log(static_cast<double>(nodes));
  GeometricLayout layout;
  if (options.corollary_digits) {
    Thm33Coefficients c = thm33_coefficients(hurst);
    for (double* field : {&c.m_coef, &c.xi0_factor, &c.xi0_power, &c.xi0_rate, &c.xin_factor,
                          &c.xin_power, &c.xin_rate}) {
      *field = round_decimals(*field, 4);
    }
    layout.m = round_level(c.m_coef * root_n, RoundingMode::up);
    layout.log_xi0 = std::log(c.xi0_factor) + c.xi0_power * log_n - c.xi0_rate * root_n;
    layout.log_xin = std::log(c.xin_factor) + c.xin_power * log_n + c.xin_rate * root_n;
  } else {
    GeometricRuleParams params;
    params.hurst = hurst;
    params.nodes = nodes;
    const ClosedFormScales scales = thm33_scales(hurst, nodes);
    params.a = std::exp(scales.log_a);
    params.b = std::exp(scales.log_b);
    layout = derive_layout(params);
  }
  layout.n = intervals_for(nodes, layout.m);
  layout.log_xi0 -= std::log(horizon);
  layout.log_xin -= std::log(horizon);

  ExpKernelApprox approx = geometric_rule_from_layout(hurst, nodes, layout);
  approx.kind = RuleKind::thm33;
  if (options.w0 == W0Rule::optimal) {
    approx.weights[0] = w0_optimal(approx, horizon);
  }
  return approx;
}

ExpKernelApprox learned_rule(double hurst, int nodes, double horizon, W0Rule w0) {
  check_hurst(hurst);
  check_horizon(horizon);
  GeometricRuleParams params;
  params.hurst = hurst;
  params.nodes = nodes;
  params.alpha = kLearnedAlpha;
  params.beta = kLearnedBeta;
  params.a = 0.65 * std::exp(3.1 * hurst) / horizon;
  params.b = std::exp(3.0 * std::pow(hurst, -0.4)) / horizon;
  params.rounding = RoundingMode::nearest;
  ExpKernelApprox approx = geometric_gaussian_rule(params);
  approx.kind = RuleKind::learned;
  if (w0 == W0Rule::optimal) {
    approx.weights[0] = w0_optimal(approx, horizon);
  }
  return approx;
}

double learned_error_prediction(double hurst, int nodes, double horizon) {
  check_hurst(hurst);
  check_horizon(horizon);
  check_nodes(nodes);
  return std::pow(horizon, hurst) * std::exp(0.065 * std::pow(hurst, -1.1)) *
         std::exp(-kLearnedAlpha * std::sqrt(static_cast<double>(nodes)) / rate_constant(hurst));
}

ExpKernelApprox general_kernel_rule(const WeightFunction& w, int nodes) {
  check_nodes(nodes);
  const double gamma = w.gamma();
  const double delta = w.delta();
  if (!(delta > 0.5 && delta < 1.5) || !(gamma < 2.0)) {
    throw std::domain_error("general_kernel_rule: need 1/2 < delta < 3/2 and gamma < 2");
  }
  const double big_a = std::sqrt(1.0 / (delta - 0.5) + 1.0 / (2.0 - gamma));
  const double root_n = std::sqrt(static_cast<double>(nodes));
  GeometricLayout layout;
  layout.m = round_level(kTheoremBeta / big_a * root_n, RoundingMode::up);
  layout.n = intervals_for(nodes, layout.m);
  layout.log_xi0 = -kTheoremAlpha * root_n / ((2.0 - gamma) * big_a);
  layout.log_xin = kTheoremAlpha * root_n / ((delta - 0.5) * big_a);

  ExpKernelApprox approx;
  approx.hurst = w.is_fractional() ? w.hurst() : std::numeric_limits<double>::quiet_NaN();
  approx.kind = w.is_fractional() ? RuleKind::thm31 : RuleKind::custom;
  approx.requested_nodes = nodes;
  approx.m = layout.m;
  approx.n = layout.n;
  approx.log_xi0 = layout.log_xi0;
  approx.log_xin = layout.log_xin;
  approx.nodes.push_back(0.0);
  if (w.is_fractional()) {
    approx.weights.push_back(riemann_w0(w.hurst(), layout.log_xi0));
  } else if (gamma < 1.0) {
    // ∫_0^xi_0 w(x) dx with x = xi_0 e^(-s); the integrand decays like e^(-(1-γ)s).
    const double xi0 = std::exp(layout.log_xi0);
    const double s_max = std::min(2000.0, 40.0 / (1.0 - gamma));
    double total = 0.0;
    for (double s0 = 0.0; s0 < s_max; s0 += 4.0) {
      total += integrate_gk15(
                   [&](double s) {
                     const double x = xi0 * std::exp(-s);
                     return w(x) * x;
                   },
                   s0, std::min(s0 + 4.0, s_max), 1e-300, 1e-13)
                   .value;
    }
    approx.weights.push_back(total);
  } else {
    approx.weights.push_back(0.0);
  }
  append_interval_rules(w, layout, approx);
  return approx;
}

double w0_optimal(const ExpKernelApprox& approx, double horizon) {
  check_horizon(horizon);
  const long double t = horizon;
  const long double h = approx.hurst;
  long double tail = 0.0L;
  long double comp = 0.0L;
  for (std::size_t i = 1; i < approx.size(); ++i) {
    const long double x = approx.nodes[i];
    const long double term = approx.weights[i] * (-std::expm1(-x * t) / x);
    const long double sum = tail + term;
    comp += std::abs(tail) >= std::abs(term) ? (tail - sum) + term : (term - sum) + tail;
    tail = sum;
  }
  const long double target = std::pow(t, h + 0.5L) / std::tgamma(h + 1.5L);
  return static_cast<double>((target - (tail + comp)) / t);
}

ExpKernelApprox with_w0(ExpKernelApprox approx, double w0) {
  if (approx.nodes.empty()) {
    approx.nodes.push_back(0.0);
    approx.weights.push_back(w0);
  } else {
    approx.weights[0] = w0;
  }
  return approx;
}

double eval_hat_g(const ExpKernelApprox& approx, double t) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    total += static_cast<long double>(approx.weights[i]) * std::exp(-static_cast<long double>(approx.nodes[i]) * t);
  }
  return static_cast<double>(total);
}

double eval_g(const FractionalKernel& kernel, double t) { return kernel(t); }

void write_nodes_csv(std::ostream& out, const ExpKernelApprox& approx) {
  out << "i,x,w\n";
  char line[96];
  for (std::size_t i = 0; i < approx.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", i, approx.nodes[i], approx.weights[i]);
    out << line;
  }
}

}  // namespace rough
