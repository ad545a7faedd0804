#include "rough/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "rough/specfun.hpp"

namespace rough {
namespace {

constexpr int kMaxLevel = 32;
constexpr double kPanelWidth = 0.5;

struct Discretization {
  std::vector<double> u;
  std::vector<double> mass;
};

// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int q) {
  std::vector<double> x(q);
  std::vector<double> w(q);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (q == 1) {
        p1 = z;
        p0 = 1.0;
      }
      dp = q * (z * p1 - p0) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) {
        break;
      }
    }
    x[i] = -z;
    x[q - 1 - i] = z;
    w[i] = w[q - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (q % 2 == 1) {
    x[q / 2] = 0.0;
  }
  return {x, w};
}

// Composite Gauss-Legendre in s = log x of the measure w(x) dx, mapped to
// u = (x - a) / (b - a). Panels are bisected until the mass is stable.
Discretization discretize(const WeightFunction& w, double a, double b, int m) {
  const int q = std::max(20, 2 * m + 8);
  const auto [gx, gw] = gauss_legendre(q);
  const double log_a = std::log(a);
  const double log_b = std::log(b);
  const double width = b - a;

  Discretization out;
  auto panel = [&](double s0, double s1, std::vector<double>* u, std::vector<double>* mass) {
    const double c = 0.5 * (s0 + s1);
    const double h = 0.5 * (s1 - s0);
    double total = 0.0;
    for (int k = 0; k < q; ++k) {
      const double s = c + h * gx[k];
      const double x = std::exp(s);
      const double lam = h * gw[k] * w(x) * x;
      total += lam;
      if (u != nullptr) {
        u->push_back((x - a) / width);
        mass->push_back(lam);
      }
    }
    return total;
  };

  std::function<void(double, double, int)> refine = [&](double s0, double s1, int depth) {
    const double mid = 0.5 * (s0 + s1);
    const double whole = panel(s0, s1, nullptr, nullptr);
    const double halves = panel(s0, mid, nullptr, nullptr) + panel(mid, s1, nullptr, nullptr);
    if (depth >= 30 || std::abs(whole - halves) <= 1e-14 * std::abs(halves)) {
      panel(s0, s1, &out.u, &out.mass);
      return;
    }
    refine(s0, mid, depth + 1);
    refine(mid, s1, depth + 1);
  };

  const int panels = std::max(1, static_cast<int>(std::ceil((log_b - log_a) / kPanelWidth)));
  const double step = (log_b - log_a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double s0 = log_a + p * step;
    const double s1 = (p + 1 == panels) ? log_b : s0 + step;
    refine(s0, s1, 0);
  }
  return out;
}

}  // namespace

double fractional_weight_constant(double hurst) {
  return 1.0 / (gamma_fn(hurst + 0.5) * gamma_fn(0.5 - hurst));
}

WeightFunction WeightFunction::fractional(double hurst) {
  if (!(hurst > 0.0 && hurst < 0.5)) {
    throw std::domain_error("WeightFunction: H must lie in (0, 1/2)");
  }
  WeightFunction w;
  w.fractional_ = true;
  w.hurst_ = hurst;
  w.gamma_ = hurst + 0.5;
  w.delta_ = hurst + 0.5;
  w.scale_ = fractional_weight_constant(hurst);
  return w;
}

WeightFunction WeightFunction::general(std::function<double(double)> fn, double gamma,
                                       double delta) {
  if (!fn) {
    throw std::invalid_argument("WeightFunction: empty callable");
  }
  WeightFunction w;
  w.gamma_ = gamma;
  w.delta_ = delta;
  w.hurst_ = std::numeric_limits<double>::quiet_NaN();
  w.fn_ = std::move(fn);
  return w;
}

double WeightFunction::operator()(double x) const {
  if (fractional_) {
    return scale_ * std::pow(x, -hurst_ - 0.5);
  }
  return fn_(x);
}

double fractional_moment(double hurst, double a, double b, int k) {
  if (!(a > 0.0) || !(a < b)) {
    throw std::domain_error("fractional_moment: need 0 < a < b");
  }
  if (k < 0) {
    throw std::domain_error("fractional_moment: k must be nonnegative");
  }
  const double p = k + 0.5 - hurst;
  // b^p - a^p = b^p (1 - (a/b)^p) without losing digits when a is close to b.
  const double diff = -std::pow(b, p) * std::expm1(p * std::log(a / b));
  return fractional_weight_constant(hurst) * diff / p;
}

QuadratureRule gauss_rule(const WeightFunction& w, double a, double b, int m) {
  if (!(a > 0.0) || !(a < b)) {
    throw std::domain_error("gauss_rule: need 0 < a < b");
  }
  if (m < 1 || m > kMaxLevel) {
    throw std::domain_error("gauss_rule: level must lie in [1, 32], got " + std::to_string(m));
  }
  const Discretization disc = discretize(w, a, b, m);
  const auto size = static_cast<Eigen::Index>(disc.u.size());
  const Eigen::Map<const Eigen::VectorXd> u(disc.u.data(), size);
  const Eigen::Map<const Eigen::VectorXd> lam(disc.mass.data(), size);

  const double total = lam.sum();
  if (!(total > 0.0) || !std::isfinite(total) || (lam.array() < 0.0).any()) {
    throw QuadratureBreakdown("gauss_rule: weight has no positive mass on the interval");
  }

  // Lanczos on diag(u) started from sqrt(lam), with full reorthogonalization.
  Eigen::MatrixXd basis(size, m);
  Eigen::VectorXd diag(m);
  Eigen::VectorXd offdiag(std::max(m - 1, 1));
  basis.col(0) = lam.cwiseSqrt() / std::sqrt(total);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd v = u.cwiseProduct(basis.col(j));
    diag(j) = basis.col(j).dot(v);
    if (j + 1 == m) {
      break;
    }
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd coeff = basis.leftCols(j + 1).transpose() * v;
      v -= basis.leftCols(j + 1) * coeff;
    }
    const double norm = v.norm();
    if (!(norm > 1e-14 * std::max(1.0, std::abs(diag(j))))) {
      throw QuadratureBreakdown("gauss_rule: recurrence broke down at level " +
                                std::to_string(j + 1));
    }
    offdiag(j) = norm;
    basis.col(j + 1) = v / norm;
  }

  QuadratureRule rule;
  rule.a = a;
  rule.b = b;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  if (m == 1) {
    rule.nodes[0] = a + (b - a) * diag(0);
    rule.weights[0] = total;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, offdiag.head(m - 1), Eigen::ComputeEigenvectors);
    if (eig.info() != Eigen::Success) {
      throw QuadratureBreakdown("gauss_rule: tridiagonal eigensolver failed");
    }
    for (int i = 0; i < m; ++i) {
      const double v0 = eig.eigenvectors()(0, i);
      rule.nodes[i] = a + (b - a) * eig.eigenvalues()(i);
      rule.weights[i] = total * v0 * v0;
    }
  }
  for (int i = 0; i < m; ++i) {
    const bool ordered = i == 0 || rule.nodes[i] > rule.nodes[i - 1];
    if (!(rule.weights[i] > 0.0) || !(rule.nodes[i] > a) || !(rule.nodes[i] < b) || !ordered) {
      throw QuadratureBreakdown("gauss_rule: lost positivity or interior nodes at level " +
                                std::to_string(m));
    }
  }
  return rule;
}

}  // namespace rough
