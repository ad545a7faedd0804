#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <random>

#include "rough/kernel.hpp"
#include "rough/quadrature.hpp"
#include "rough/specfun.hpp"

using rough::fractional_moment;
using rough::gauss_rule;
using rough::WeightFunction;

namespace {

double rule_moment(const rough::QuadratureRule& r, int k) {
  double acc = 0.0;
  for (int i = 0; i < r.level(); ++i) {
    acc += r.weights[i] * std::pow(r.nodes[i], k);
  }
  return acc;
}

}  // namespace

TEST_CASE("fractional moments") {
  const double c = rough::fractional_weight_constant(0.1);
  CHECK(c == doctest::Approx(1.0 / (rough::gamma_fn(0.6) * rough::gamma_fn(0.4))).epsilon(1e-14));
  CHECK(fractional_moment(0.1, 1.0, 2.0, 0) ==
        doctest::Approx(c * (std::pow(2.0, 0.4) - 1.0) / 0.4).epsilon(1e-14));
  CHECK_THROWS_AS(fractional_moment(0.25, 1.0, 1.0, 1), std::domain_error);
  CHECK_THROWS_AS(fractional_moment(0.25, 0.0, 1.0, 1), std::domain_error);

  auto f = [&](double x) { return x * x * x * c * std::pow(x, -0.6); };
  const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.5, 4.0, 15, 1e-15);
  CHECK(std::abs(fractional_moment(0.1, 0.5, 4.0, 3) / ref - 1.0) <= 1e-12);
}

TEST_CASE("level-1 rule is the weighted barycenter") {
  const auto w = WeightFunction::fractional(0.3);
  const auto r = gauss_rule(w, 0.7, 2.9, 1);
  REQUIRE(r.level() == 1);
  CHECK(r.nodes[0] == doctest::Approx(fractional_moment(0.3, 0.7, 2.9, 1) /
                                      fractional_moment(0.3, 0.7, 2.9, 0)).epsilon(1e-12));
  CHECK(r.weights[0] == doctest::Approx(fractional_moment(0.3, 0.7, 2.9, 0)).epsilon(1e-12));
}

TEST_CASE("constant weight gives shifted Gauss-Legendre") {
  const auto w = WeightFunction::general([](double) { return 1.0; }, 0.0, 1.0);
  const auto r = gauss_rule(w, 1.0, 3.0, 2);
  REQUIRE(r.level() == 2);
  CHECK(r.nodes[0] == doctest::Approx(2.0 - 1.0 / std::sqrt(3.0)).epsilon(1e-10));
  CHECK(r.nodes[1] == doctest::Approx(2.0 + 1.0 / std::sqrt(3.0)).epsilon(1e-10));
  CHECK(r.weights[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.weights[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("degree 2m-1 exactness on a theorem-sized interval") {
  const double b = std::exp(rough::kTheoremBeta * rough::kTheoremAlpha);
  const auto r = gauss_rule(WeightFunction::fractional(0.1), 1.0, b, 3);
  for (int k = 0; k <= 5; ++k) {
    const double exact = fractional_moment(0.1, 1.0, b, k);
    CHECK(std::abs(rule_moment(r, k) / exact - 1.0) <= 1e-12);
  }
}

TEST_CASE("randomized exactness, positivity, interlacing, scale covariance") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uh(0.05, 0.45);
  std::uniform_real_distribution<double> ua(std::log(1e-3), std::log(1e3));
  std::uniform_real_distribution<double> ur(std::log(1.05), std::log(10.0));
  std::uniform_real_distribution<double> ul(std::log(1e-4), std::log(1e4));
  std::uniform_int_distribution<int> um(1, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const double h = uh(rng);
    const double a = std::exp(ua(rng));
    const double b = a * std::exp(ur(rng));
    const int m = um(rng);
    const auto w = WeightFunction::fractional(h);
    const auto r = gauss_rule(w, a, b, m);
    REQUIRE(r.level() == m);
    for (int k = 0; k <= 2 * m - 1; ++k) {
      const double exact = fractional_moment(h, a, b, k);
      CHECK(std::abs(rule_moment(r, k) - exact) <= 1e-9 * std::abs(exact));
    }
    CHECK(r.nodes.front() > a);
    CHECK(r.nodes.back() < b);
    for (int i = 0; i < m; ++i) {
      CHECK(r.weights[i] > 0.0);
      if (i > 0) {
        CHECK(r.nodes[i] > r.nodes[i - 1]);
      }
    }
    const auto next = gauss_rule(w, a, b, m + 1);
    for (int i = 0; i < m; ++i) {
      CHECK(next.nodes[i] < r.nodes[i]);
      CHECK(r.nodes[i] < next.nodes[i + 1]);
    }
    const double lambda = std::exp(ul(rng));
    const auto scaled = gauss_rule(w, lambda * a, lambda * b, m);
    for (int i = 0; i < m; ++i) {
      CHECK(scaled.nodes[i] == doctest::Approx(lambda * r.nodes[i]).epsilon(1e-9));
      CHECK(scaled.weights[i] == doctest::Approx(std::pow(lambda, 0.5 - h) * r.weights[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("argument checks") {
  const auto w = WeightFunction::fractional(0.2);
  CHECK_THROWS(gauss_rule(w, 2.0, 1.0, 2));
  CHECK_THROWS(gauss_rule(w, 0.0, 1.0, 2));
  CHECK_THROWS(gauss_rule(w, 1.0, 2.0, 0));
  CHECK_THROWS(gauss_rule(w, 1.0, 2.0, 33));
}
