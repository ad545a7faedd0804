#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>

#include "rough/kernel.hpp"
#include "rough/rheston.hpp"
#include "rough/specfun.hpp"

using namespace rough;

namespace {

double sup_diff(const RiccatiSolution& a, const RiccatiSolution& b) {
  REQUIRE(a.values.size() == b.values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    d = std::max(d, std::abs(a.values[i] - b.values[i]));
  }
  return d;
}

// Single node: y' = -x y + F(z, w y), classical RK4.
cplx single_node_rk4(const RHestonParams& p, double x, double w, cplx z, double horizon, int n) {
  auto rhs = [&](cplx y) { return -x * y + riccati_f(p, z, w * y); };
  const double h = horizon / n;
  cplx y = 0.0;
  for (int i = 0; i < n; ++i) {
    const cplx k1 = rhs(y);
    const cplx k2 = rhs(y + 0.5 * h * k1);
    const cplx k3 = rhs(y + 0.5 * h * k2);
    const cplx k4 = rhs(y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return w * y;
}

}  // namespace

TEST_CASE("Riccati right-hand side") {
  const RHestonParams p;
  CHECK(std::abs(riccati_f(p, 2.0, 1.0) - cplx(0.325, 0.0)) < 1e-14);
  CHECK(std::abs(riccati_f(p, 0.0, 0.0)) == 0.0);
  CHECK(std::abs(riccati_f(p, 1.0, 0.0)) == 0.0);
  RHestonParams s = p;
  s.form = RiccatiForm::lambda_scaled;
  // 1 + 0.3 (-0.42 - 1) + 0.09 * 0.09 / 2
  CHECK(std::abs(riccati_f(s, 2.0, 1.0) - cplx(1.0 - 0.426 + 0.00405, 0.0)) < 1e-14);
}

TEST_CASE("psi vanishes at z = 0 and z = 1") {
  const RHestonParams p;
  const auto r = learned_rule(p.hurst, 8, p.maturity);
  for (cplx z : {cplx(0.0), cplx(1.0)}) {
    for (const auto& sol : {psi_fractional_adams(p, z, 1.0, 100),
                            psi_markovian_exp_pc(p, r, z, 1.0, 100)}) {
      for (const auto& v : sol.values) {
        CHECK(std::abs(v) == 0.0);
      }
    }
    CHECK(std::abs(char_fn(p, RiccatiSolver::fractional_adams, nullptr, z, 100) - 1.0) < 1e-14);
    CHECK(std::abs(char_fn(p, RiccatiSolver::markovian_exp_pc, &r, z, 100) - 1.0) < 1e-14);
  }
}

TEST_CASE("single-node Markovian solver against an ODE oracle") {
  const RHestonParams p;
  ExpKernelApprox a;
  a.hurst = p.hurst;
  a.nodes = {3.0};
  a.weights = {0.8};
  const cplx z(2.0, -5.0);
  const cplx ref = single_node_rk4(p, 3.0, 0.8, z, 1.0, 20000);
  const auto sol = psi_markovian_exp_pc(p, a, z, 1.0, 2000);
  CHECK(std::abs(sol.values.back() - ref) < 1e-5);

  // Second order: halving the step quarters the error.
  const double e1 = std::abs(psi_markovian_exp_pc(p, a, z, 1.0, 50).values.back() - ref);
  const double e2 = std::abs(psi_markovian_exp_pc(p, a, z, 1.0, 100).values.back() - ref);
  const double e3 = std::abs(psi_markovian_exp_pc(p, a, z, 1.0, 200).values.back() - ref);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("Markovian and fractional solvers agree for a fine rule") {
  const RHestonParams p;
  const auto r = learned_rule(p.hurst, 256, p.maturity);
  const cplx z(2.0, -5.0);
  const auto frac = psi_fractional_adams(p, z, 1.0, 2000);
  const auto mark = psi_markovian_exp_pc(p, r, z, 1.0, 2000);
  CHECK(sup_diff(frac, mark) < 1e-2);
  CHECK(frac.times.size() == 2001);
  CHECK(frac.solver == RiccatiSolver::fractional_adams);
  CHECK(to_string(RiccatiSolver::markovian_exp_pc) == "markovian_exp_pc");
}

TEST_CASE("payoff transform") {
  CHECK(std::abs(payoff_transform(cplx(0.0, 2.0), 1.0) - cplx(0.5, 0.0)) < 1e-15);
  for (double u : {-3.0, 0.0, 1.5, 7.0}) {
    for (double strike : {0.8, 1.0, 1.3}) {
      const cplx zeta(u, 2.0);
      auto re = [&](double x) { return std::real(std::exp(cplx(0.0, 1.0) * zeta * x) * (std::exp(x) - strike)); };
      auto im = [&](double x) { return std::imag(std::exp(cplx(0.0, 1.0) * zeta * x) * (std::exp(x) - strike)); };
      using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
      const double lo = std::log(strike);
      const cplx ref(gk::integrate(re, lo, lo + 60.0, 15, 1e-13), gk::integrate(im, lo, lo + 60.0, 15, 1e-13));
      CHECK(std::abs(payoff_transform(zeta, strike) - ref) < 1e-9 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("characteristic function symmetry and real prices") {
  const RHestonParams p;
  const auto r = learned_rule(p.hurst, 8, p.maturity);
  const cplx z(2.0, -3.0);
  for (auto solver : {RiccatiSolver::fractional_adams, RiccatiSolver::markovian_exp_pc}) {
    const auto* ap = solver == RiccatiSolver::markovian_exp_pc ? &r : nullptr;
    const cplx a = char_fn(p, solver, ap, z, 300);
    const cplx b = char_fn(p, solver, ap, std::conj(z), 300);
    CHECK(std::abs(a - std::conj(b)) < 1e-12);
  }
  FourierOptions opt;
  opt.grid = 400;
  opt.riccati_steps = 100;
  const auto g = phi_grid(p, RiccatiSolver::markovian_exp_pc, &r, opt);
  for (double k : {-0.3, 0.0, 0.2}) {
    double imag = 1.0;
    const double c = fourier_call(g, 1.0, k, &imag);
    CHECK(std::abs(imag) <= 1e-10);
    CHECK(c > std::max(1.0 - std::exp(k), 0.0));
    CHECK(c < 1.0);
  }
}

TEST_CASE("deterministic variance gives Black-Scholes") {
  RHestonParams p;
  p.nu = 1e-10;
  // The drift is theta - lambda V, so V stays at v0.
  p.theta = p.lambda * p.v0;
  const auto r = learned_rule(p.hurst, 16, p.maturity);
  const std::vector<double> k{-0.4, -0.1, 0.0, 0.25};
  for (auto solver : {RiccatiSolver::fractional_adams, RiccatiSolver::markovian_exp_pc}) {
    const auto* ap = solver == RiccatiSolver::markovian_exp_pc ? &r : nullptr;
    const cplx z(2.0, -4.0);
    const cplx bs = std::exp(0.5 * (z * z - z) * p.v0 * p.maturity);
    const double coarse = std::abs(char_fn(p, solver, ap, z, 200) - bs);
    const double fine = std::abs(char_fn(p, solver, ap, z, 800) - bs);
    CHECK(coarse < 5e-6);
    CHECK(fine < coarse / 4.0);
    const auto s = heston_smile(p, solver, ap, k, FourierOptions::desk());
    for (std::size_t i = 0; i < k.size(); ++i) {
      CHECK(s.iv[i] == doctest::Approx(std::sqrt(p.v0)).epsilon(1e-5));
    }
  }
}

TEST_CASE("divergence and argument checks") {
  RHestonParams p;
  p.nu = 3.0;
  p.rho = 0.9;
  CHECK_THROWS_AS(psi_fractional_adams(p, 30.0, 5.0, 400), RiccatiDivergence);
  const auto r = learned_rule(p.hurst, 8, 1.0);
  CHECK_THROWS_AS(psi_markovian_exp_pc(p, r, 30.0, 5.0, 400), RiccatiDivergence);

  const RHestonParams q;
  FourierOptions opt;
  opt.damping = 1.0;
  CHECK_THROWS(fourier_call(q, RiccatiSolver::fractional_adams, nullptr, 0.0, opt));
  CHECK_THROWS(char_fn(q, RiccatiSolver::markovian_exp_pc, nullptr, 2.0, 10));
  RHestonParams bad;
  bad.nu = -1.0;
  CHECK_THROWS(bad.validate());
}
