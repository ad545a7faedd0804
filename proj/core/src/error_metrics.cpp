#include "rough/error_metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>

#include "rough/integrate.hpp"
#include "rough/nelder_mead.hpp"
#include "rough/parallel.hpp"
#include "rough/specfun.hpp"

namespace rough {
namespace {

using Real = long double;

// Neumaier summation.
class CompensatedSum {
 public:
  void add(Real term) {
    const Real next = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      carry_ += (sum_ - next) + term;
    } else {
      carry_ += (term - next) + sum_;
    }
    sum_ = next;
  }
  Real value() const { return sum_ + carry_; }

 private:
  Real sum_ = 0.0L;
  Real carry_ = 0.0L;
};

void check_approx(const ExpKernelApprox& approx) {
  if (approx.nodes.size() != approx.weights.size()) {
    throw std::invalid_argument("approximation: nodes and weights differ in length");
  }
  if (!approx.nodes.empty() && approx.nodes[0] != 0.0) {
    throw std::domain_error("approximation: first node must be zero");
  }
  for (std::size_t i = 1; i < approx.size(); ++i) {
    if (!(approx.nodes[i] > 0.0)) {
      throw std::domain_error("approximation: nodes after the first must be positive");
    }
  }
}

void check_hurst_horizon(double hurst, double horizon) {
  if (!(hurst > 0.0 && hurst < 0.5)) {
    throw std::domain_error("Hurst parameter must lie in (0, 1/2)");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::domain_error("horizon T must be positive");
  }
}

// (1 - e^(-sT)) / s without cancellation for small sT.
Real decay_integral(Real s, Real horizon) {
  const Real st = s * horizon;
  if (st < 0.5L) {
    return -std::expm1(-st) / s;
  }
  return (1.0L - std::exp(-st)) / s;
}

Real l2_error_sq_exact(const ExpKernelApprox& approx, double hurst, double horizon) {
  const Real h = hurst;
  const Real t = horizon;
  const Real g_half = std::tgamma(h + 0.5L);
  const std::size_t size = approx.size();

  CompensatedSum total;
  total.add(std::pow(t, 2.0L * h) / (2.0L * h * g_half * g_half));
  if (size == 0) {
    return total.value();
  }
  const Real w0 = approx.weights[0];
  total.add(w0 * w0 * t);
  total.add(-2.0L * w0 * std::pow(t, h + 0.5L) / std::tgamma(h + 1.5L));

  std::vector<Real> x(size);
  std::vector<Real> w(size);
  std::vector<Real> decay(size);
  for (std::size_t i = 1; i < size; ++i) {
    x[i] = approx.nodes[i];
    w[i] = approx.weights[i];
    decay[i] = std::exp(-x[i] * t);
  }

  CompensatedSum cross;
  CompensatedSum incomplete;
  for (std::size_t i = 1; i < size; ++i) {
    cross.add(w[i] * decay_integral(x[i], t));
    const Real lower = lower_incomplete_gamma<Real>(h + 0.5L, x[i] * t);
    incomplete.add(w[i] * std::exp((-h - 0.5L) * std::log(x[i])) * lower);
  }
  total.add(2.0L * w0 * cross.value());
  total.add(-2.0L / g_half * incomplete.value());

  // Σ_ij w_i w_j (1 - e^(-(x_i+x_j)T)) / (x_i+x_j), symmetric part doubled.
  CompensatedSum pairs;
  for (std::size_t i = 1; i < size; ++i) {
    CompensatedSum row;
    for (std::size_t j = i + 1; j < size; ++j) {
      const Real s = x[i] + x[j];
      const Real st = s * t;
      const Real num = st < 0.5L ? -std::expm1(-st) : 1.0L - decay[i] * decay[j];
      row.add(w[j] * num / s);
    }
    pairs.add(2.0L * w[i] * row.value());
    pairs.add(w[i] * w[i] * decay_integral(2.0L * x[i], t));
  }
  total.add(pairs.value());
  return total.value();
}

ErrorReport make_report(Real squared, ErrorMethod method, double horizon, bool converged) {
  ErrorReport report;
  report.l2_error_sq = static_cast<double>(std::max(squared, 0.0L));
  report.l2_error = static_cast<double>(std::sqrt(std::max(squared, 0.0L)));
  report.method = method;
  report.horizon = horizon;
  report.converged = converged;
  return report;
}

double median(std::vector<double> values) {
  if (values.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

LogLinearFit regress(const std::vector<double>& h, const std::vector<double>& log_n,
                     const std::vector<double>& y) {
  const auto rows = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd design(rows, 3);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    design(r, 0) = 1.0;
    design(r, 1) = h[r];
    design(r, 2) = log_n[r];
    rhs(r) = y[r];
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  return {coef(0), coef(1), coef(2)};
}

// Intercept of the least-squares line y = c0 + c1 / sqrt(N).
double limit_in_root_n(const std::vector<int>& nodes, const std::vector<double>& y) {
  const auto rows = static_cast<Eigen::Index>(y.size());
  Eigen::MatrixXd design(rows, 2);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    design(r, 0) = 1.0;
    design(r, 1) = 1.0 / std::sqrt(static_cast<double>(nodes[r]));
    rhs(r) = y[r];
  }
  return design.colPivHouseholderQr().solve(rhs)(0);
}

}  // namespace

ErrorReport l2_error_exact(const ExpKernelApprox& approx, double hurst, double horizon) {
  check_hurst_horizon(hurst, horizon);
  check_approx(approx);
  return make_report(l2_error_sq_exact(approx, hurst, horizon), ErrorMethod::exact, horizon, true);
}

ErrorReport l2_error_numeric(const ExpKernelApprox& approx, double hurst, double horizon) {
  check_hurst_horizon(hurst, horizon);
  check_approx(approx);
  const Real h = hurst;
  const Real inv_gamma = 1.0L / std::tgamma(h + 0.5L);
  double x_max = 0.0;
  Real hat_g0 = 0.0L;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    x_max = std::max(x_max, approx.nodes[i]);
    hat_g0 += approx.weights[i];
  }
  // On [0, eps] every exponential is 1 to within 1e-10, so Ĝ is constant there.
  const double eps = std::min(1e-10 * horizon, 1e-10 / std::max(x_max, 1e-300));
  const Real e = eps;
  const Real head = std::pow(e, 2.0L * h) * inv_gamma * inv_gamma / (2.0L * h) -
                    2.0L * hat_g0 * std::pow(e, h + 0.5L) / std::tgamma(h + 1.5L) +
                    hat_g0 * hat_g0 * e;

  auto integrand = [&](double s) {
    const Real t = std::exp(static_cast<Real>(s));
    Real hat_g = 0.0L;
    for (std::size_t i = 0; i < approx.size(); ++i) {
      hat_g += static_cast<Real>(approx.weights[i]) * std::exp(-static_cast<Real>(approx.nodes[i]) * t);
    }
    const Real diff = std::pow(t, h - 0.5L) * inv_gamma - hat_g;
    return static_cast<double>(diff * diff * t);
  };
  const double lo = std::log(eps);
  const double hi = std::log(horizon);
  const int panels = std::max(1, static_cast<int>(std::ceil(hi - lo)));
  CompensatedSum body;
  bool converged = true;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + (hi - lo) * p / panels;
    const double b = p + 1 == panels ? hi : lo + (hi - lo) * (p + 1) / panels;
    const IntegrationResult part = integrate_gk15(integrand, a, b, 1e-13 / panels, 1e-11, 400);
    converged = converged && part.converged;
    body.add(part.value);
  }
  body.add(head);
  return make_report(body.value(), ErrorMethod::numeric, horizon, converged);
}

double bound_thm31(double hurst, int nodes, double horizon, double lipschitz) {
  check_hurst_horizon(hurst, horizon);
  const double c_h = fractional_weight_constant(hurst);
  const double big_a = rate_constant(hurst);
  const double e = std::exp(kTheoremAlpha * kTheoremBeta);
  const double n = nodes;
  const double bracket =
      std::pow(horizon, 3) / std::pow(1.5 - hurst, 2) + 3.0 / (2.0 * hurst * hurst) +
      5.0 * std::pow(std::numbers::pi, 3) / 48.0 * (e - 1.0) * (e - 1.0) *
          std::pow(big_a, 2.0 - 2.0 * hurst) * std::pow(horizon, 2.0 * hurst) /
          (std::pow(kTheoremBeta, 2.0 - 2.0 * hurst) * hurst) * std::pow(n, 1.0 - hurst);
  return lipschitz * c_h * c_h * bracket * std::exp(-2.0 * kTheoremAlpha / big_a * std::sqrt(n));
}

double bound_thm33(double hurst, int nodes, double horizon, double lipschitz,
                   bool corollary_digits) {
  check_hurst_horizon(hurst, horizon);
  Thm33Coefficients c = thm33_coefficients(hurst);
  if (corollary_digits) {
    c.bound_factor = round_decimals(c.bound_factor, 4);
    c.bound_power = round_decimals(c.bound_power, 4);
    c.bound_rate = round_decimals(c.bound_rate, 4);
  }
  const double n = nodes;
  return lipschitz * std::pow(horizon, 2.0 * hurst) * c.bound_factor * std::pow(n, c.bound_power) *
         std::exp(-c.bound_rate * std::sqrt(n));
}

double bound_single_interval(double hurst, double a, double b, int m, double t) {
  if (!(a > 0.0) || !(a < b) || !(t > 0.0) || m < 1) {
    throw std::domain_error("bound_single_interval: need 0 < a < b, t > 0, m >= 1");
  }
  const double c_h = fractional_weight_constant(hurst);
  return std::sqrt(5.0 * std::pow(std::numbers::pi, 3) / 18.0) * c_h /
         (std::pow(2.0, 2 * m + 1) * std::pow(m, hurst)) * std::pow(t, hurst - 0.5) *
         std::pow(b / a - 1.0, 2 * m + 1);
}

OptimizationResult optimize_xi(double hurst, double horizon, int nodes, int m,
                               const OptimizeOptions& options) {
  check_hurst_horizon(hurst, horizon);
  if (nodes < 1 || m < 1) {
    throw std::domain_error("optimize_xi: N and m must be positive");
  }
  const int n = intervals_for(nodes, m);

  auto objective = [&](std::span<const double> p) {
    if (!(p[1] > p[0]) || !std::isfinite(p[0]) || !std::isfinite(p[1]) ||
        std::abs(p[0]) > 700.0 || std::abs(p[1]) > 700.0) {
      return std::numeric_limits<double>::infinity();
    }
    try {
      ExpKernelApprox approx = geometric_rule_from_layout(hurst, nodes, {m, n, p[0], p[1]});
      approx.weights[0] = w0_optimal(approx, horizon);
      const Real sq = l2_error_sq_exact(approx, hurst, horizon);
      if (!(sq > 0.0L)) {
        return std::numeric_limits<double>::infinity();
      }
      return static_cast<double>(std::log(sq));
    } catch (const QuadratureBreakdown&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<std::vector<double>> starts;
  const ExpKernelApprox learned = learned_rule(hurst, nodes, horizon, W0Rule::riemann);
  starts.push_back({learned.log_xi0, learned.log_xin});
  if (nodes >= 2) {
    // For small H and N the closed-form interval can come out empty.
    try {
      const ExpKernelApprox theorem = thm33_rule(hurst, nodes, horizon);
      starts.push_back({theorem.log_xi0, theorem.log_xin});
    } catch (const std::domain_error&) {
    }
  }
  for (int coord = 0; coord < 2; ++coord) {
    for (double shift : {-1.0, 1.0}) {
      std::vector<double> s = {learned.log_xi0, learned.log_xin};
      s[coord] += shift;
      starts.push_back(s);
    }
  }

  NelderMeadOptions nm;
  nm.tolerance = options.tolerance;
  nm.max_evaluations = options.max_evaluations;
  std::vector<NelderMeadResult> runs(starts.size());
  parallel_for(starts.size(), options.threads, [&](std::size_t i) {
    NelderMeadResult first = nelder_mead(objective, starts[i], nm);
    // One restart from the best point guards against a collapsed simplex.
    NelderMeadOptions again = nm;
    again.max_evaluations = std::max(1, nm.max_evaluations - first.evaluations);
    again.initial_step = 0.25;
    NelderMeadResult second = nelder_mead(objective, first.x, again);
    const int used = first.evaluations + second.evaluations;
    runs[i] = second.value <= first.value ? std::move(second) : std::move(first);
    runs[i].evaluations = used;
  });

  OptimizationResult best;
  best.nodes = nodes;
  best.m = m;
  best.n = n;
  double best_value = std::numeric_limits<double>::infinity();
  int total_evaluations = 0;
  for (const auto& run : runs) {
    total_evaluations += run.evaluations;
    if (run.value < best_value) {
      best_value = run.value;
      best.log_xi0 = run.x[0];
      best.log_xin = run.x[1];
      best.converged = run.converged;
    }
  }
  best.evaluations = total_evaluations;
  best.l2_error = std::isfinite(best_value) ? std::exp(0.5 * best_value)
                                            : std::numeric_limits<double>::infinity();
  return best;
}

OptimizationResult optimize_full(double hurst, double horizon, int nodes, int m_max,
                                 const OptimizeOptions& options) {
  if (m_max < 1) {
    throw std::domain_error("optimize_full: m_max must be positive");
  }
  const int top = std::min(m_max, nodes);
  OptimizationResult best;
  best.l2_error = std::numeric_limits<double>::infinity();
  int total = 0;
  for (int m = 1; m <= top; ++m) {
    const OptimizationResult r = optimize_xi(hurst, horizon, nodes, m, options);
    total += r.evaluations;
    if (r.l2_error < best.l2_error) {
      best = r;
    }
  }
  best.evaluations = total;
  return best;
}

ExpKernelApprox optimized_rule(double hurst, double horizon, const OptimizationResult& result) {
  ExpKernelApprox approx = geometric_rule_from_layout(hurst, result.nodes, result.layout());
  approx.kind = RuleKind::optimized;
  approx.weights[0] = w0_optimal(approx, horizon);
  return approx;
}

FitReport fit_learned_constants(const std::vector<double>& hurst_grid,
                                const std::vector<int>& node_grid, double horizon,
                                const OptimizeOptions& options) {
  const std::set<double> hs(hurst_grid.begin(), hurst_grid.end());
  const std::set<int> ns(node_grid.begin(), node_grid.end());
  if (hs.size() < 2 || ns.size() < 3) {
    throw InsufficientData("fit_learned_constants: need at least two H values and three N values");
  }
  if (*ns.begin() < 1) {
    throw std::domain_error("fit_learned_constants: N must be positive");
  }

  FitReport report;
  for (double h : hs) {
    for (int nodes : ns) {
      FitPoint point{};
      point.hurst = h;
      point.nodes = nodes;
      point.optimum = optimize_full(h, horizon, nodes, 10, options);
      const double big_a = rate_constant(h);
      const double root_n = std::sqrt(static_cast<double>(nodes));
      const double log_t = std::log(horizon);
      point.alpha_from_xi0 = -(point.optimum.log_xi0 + log_t) * (1.5 - h) * big_a / root_n;
      point.alpha_from_xin = (point.optimum.log_xin + log_t) * h * big_a / root_n;
      const double err = point.optimum.l2_error;
      point.alpha_from_error =
          -std::log(err * err / std::pow(horizon, 2.0 * h)) * big_a / (2.0 * root_n);
      point.beta = point.optimum.m * big_a / root_n;
      report.points.push_back(point);
    }
  }

  // Larger-N half of the distinct N values, at least two of them.
  const std::vector<int> sorted(ns.begin(), ns.end());
  const int cutoff = sorted[std::min(sorted.size() / 2, sorted.size() - 2)];
  std::vector<double> a0;
  std::vector<double> an;
  std::vector<double> ae;
  std::vector<double> betas;
  for (const FitPoint& p : report.points) {
    if (p.nodes < cutoff) {
      continue;
    }
    a0.push_back(p.alpha_from_xi0);
    an.push_back(p.alpha_from_xin);
    ae.push_back(p.alpha_from_error);
    betas.push_back(p.beta);
  }
  report.alpha_from_xi0 = median(a0);
  report.alpha_from_xin = median(an);
  report.alpha_from_error = median(ae);
  report.beta_hat = median(betas);

  // With C_i = 1 each per-point alpha carries a log(C_i) / sqrt(N) offset, so
  // every (H, source) sequence is extrapolated to N = infinity first.
  for (double hurst : hs) {
    std::vector<int> nodes;
    std::vector<double> by_source[3];
    for (const FitPoint& p : report.points) {
      if (p.hurst != hurst || p.nodes < cutoff) {
        continue;
      }
      nodes.push_back(p.nodes);
      by_source[0].push_back(p.alpha_from_xi0);
      by_source[1].push_back(p.alpha_from_xin);
      by_source[2].push_back(p.alpha_from_error);
    }
    for (const auto& y : by_source) {
      report.alpha_limits.push_back(limit_in_root_n(nodes, y));
    }
  }
  report.alpha_hat = median(report.alpha_limits);

  std::vector<double> h;
  std::vector<double> log_n;
  std::vector<double> y0;
  std::vector<double> yn;
  std::vector<double> ye;
  const double alpha = report.alpha_hat;
  for (const FitPoint& p : report.points) {
    const double big_a = rate_constant(p.hurst);
    const double root_n = std::sqrt(static_cast<double>(p.nodes));
    const double log_t = std::log(horizon);
    h.push_back(p.hurst);
    log_n.push_back(std::log(static_cast<double>(p.nodes)));
    y0.push_back(p.optimum.log_xi0 + log_t + alpha * root_n / ((1.5 - p.hurst) * big_a));
    yn.push_back(p.optimum.log_xin + log_t - alpha * root_n / (p.hurst * big_a));
    ye.push_back(std::log(p.optimum.l2_error) - p.hurst * log_t + alpha * root_n / big_a);
  }
  report.xi0_factor = regress(h, log_n, y0);
  report.xin_factor = regress(h, log_n, yn);
  report.error_factor = regress(h, log_n, ye);
  return report;
}

ErrorTableRow make_error_row(const ExpKernelApprox& approx, double horizon) {
  return {approx.hurst,
          approx.requested_nodes,
          approx.kind,
          approx.m,
          approx.n,
          approx.log_xi0,
          approx.log_xin,
          l2_error_exact(approx, horizon).l2_error};
}

void write_error_table_csv(std::ostream& out, const std::vector<ErrorTableRow>& rows) {
  out << "H,N,rule,m,n,log_xi0,log_xin,l2_error\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%.17g,%d,%s,%d,%d,%.17g,%.17g,%.17g\n", r.hurst, r.nodes,
                  std::string(to_string(r.rule)).c_str(), r.m, r.n, r.log_xi0, r.log_xin,
                  r.l2_error);
    out << line;
  }
}

void write_fit_csv(std::ostream& out, const FitReport& report) {
  out << "H,N,m,n,log_xi0,log_xin,l2_error,alpha_xi0,alpha_xin,alpha_error,beta\n";
  char line[320];
  for (const auto& p : report.points) {
    std::snprintf(line, sizeof line, "%.17g,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  p.hurst, p.nodes, p.optimum.m, p.optimum.n, p.optimum.log_xi0,
                  p.optimum.log_xin, p.optimum.l2_error, p.alpha_from_xi0, p.alpha_from_xin,
                  p.alpha_from_error, p.beta);
    out << line;
  }
}

}  // namespace rough
