// Acceptance checks 1-12. Prints one PASS/FAIL line per criterion and a
// summary; the exit code is 0 once every selected check has run, so failures
// are reported rather than aborting the suite. Pass criterion numbers as
// arguments to run a subset, and --report FILE to keep a copy.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rough/error_metrics.hpp"
#include "rough/fbm.hpp"
#include "rough/kernel.hpp"
#include "rough/parallel.hpp"
#include "rough/quadrature.hpp"
#include "rough/rbergomi.hpp"
#include "rough/rheston.hpp"
#include "rough/smile.hpp"
#include "rough/specfun.hpp"

using namespace rough;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void fail(const std::string& note) {
    pass = false;
    notes.push_back(note);
  }
  void info(const std::string& note) { notes.push_back(note); }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <class... Args>
std::string fmtn(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::vector<int> kTableN{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};

struct TheoremRow {
  int m;
  int n;
  double neg_log_xi0;
  double log_xin;
  double error;
  double bound;
};

// H = 0.1, T = 1.
const std::vector<TheoremRow> kTheorem{
    {1, 1, -1.2421, 1.2999, 0.996490, 4.190757},
    {1, 2, -1.2246, 1.5452, 0.975001, 4.089250},
    {1, 4, -1.1672, 2.3483, 0.899764, 3.773728},
    {1, 8, -1.0535, 3.9403, 0.757286, 3.218395},
    {1, 16, -0.8602, 6.6478, 0.571030, 2.455046},
    {1, 32, -0.5541, 10.933, 0.372303, 1.599424},
    {2, 32, -0.0887, 17.450, 0.195570, 0.833625},
    {2, 64, 0.6021, 27.121, 0.075222, 0.316916},
    {3, 85, 1.6115, 41.256, 0.018481, 0.077112},
    {3, 171, 3.0718, 61.701, 0.002405, 0.009982},
    {5, 205, 5.1694, 91.071, 0.000128, 0.000529},
};

const std::vector<double> kOptimalXiError{0.683687, 0.528237, 0.346109, 0.199291,
                                          0.098625, 0.043699, 0.010167, 0.002037,
                                          0.000158, 1.14e-05, 6.03e-08};
const std::vector<double> kOptimalFullError{0.683687, 0.528237, 0.346109, 0.199291,
                                            0.098625, 0.039571, 0.010167, 0.001559,
                                            0.000123, 3.50e-06, 1.98e-08};
const std::vector<double> kLearnedError{0.917761, 0.697745, 0.389907, 0.211681,
                                        0.098789, 0.041534, 0.010345, 0.001611,
                                        0.000124, 3.72e-06, 2.24e-08};
const std::vector<double> kLearnedBound{1.307860, 1.041449, 0.754638, 0.478511,
                                        0.251243, 0.101018, 0.027849, 0.004502,
                                        0.000342, 8.94e-06, 5.16e-08};

Outcome ac1() {
  Outcome o;
  Thm33Options opt;
  opt.corollary_digits = true;
  opt.enforce_min_nodes = false;
  opt.w0 = W0Rule::optimal;
  for (std::size_t i = 0; i < kTableN.size(); ++i) {
    const int n = kTableN[i];
    const auto& row = kTheorem[i];
    const auto r = thm33_rule(0.1, n, 1.0, opt);
    if (r.m != row.m || r.n != row.n) {
      o.fail(fmtn("N=%d m,n=%d,%d vs %d,%d", n, r.m, r.n, row.m, row.n));
    }
    if (std::abs(-r.log_xi0 - row.neg_log_xi0) > 5e-4 || std::abs(r.log_xin - row.log_xin) > 5e-4) {
      o.fail(fmtn("N=%d xi %.5f,%.4f vs %.4f,%.4f", n, -r.log_xi0, r.log_xin, row.neg_log_xi0,
                  row.log_xin));
    }
    const double err = l2_error_exact(r, 1.0).l2_error;
    if (std::abs(err - row.error) > 1e-4) {
      o.fail(fmtn("N=%d error %.6f vs %.6f", n, err, row.error));
    }
    const double bound = std::sqrt(bound_thm33(0.1, n, 1.0, 1.0, true));
    if (std::abs(bound - row.bound) > 1e-4) {
      o.fail(fmtn("N=%d bound %.6f vs %.6f", n, bound, row.bound));
    }
  }
  return o;
}

bool same_4_digits(double a, double b) {
  auto round4 = [](double x) {
    const double e = std::floor(std::log10(std::abs(x)));
    const double scale = std::pow(10.0, 3.0 - e);
    return std::round(x * scale) / scale;
  };
  return round4(a) == round4(b);
}

Outcome ac2() {
  Outcome o;
  const auto c = thm33_coefficients(0.1);
  const std::vector<std::pair<const char*, std::pair<double, double>>> items{
      {"m", {c.m_coef, 0.1306}},
      {"n", {c.n_coef, 7.6568}},
      {"xi0 factor", {c.xi0_factor, 4.3679}},
      {"xin factor", {c.xin_factor, 0.1421}},
      {"xi0 power", {c.xi0_power, 0.1135}},
      {"xin power", {c.xin_power, -1.5889}},
      {"xi0 rate", {c.xi0_rate, 0.2322}},
      {"xin rate", {c.xin_rate, 3.2511}},
      {"bound factor", {c.bound_factor, 33.6483}},
      {"bound power", {c.bound_power, 0.3178}},
      {"bound rate", {c.bound_rate, 0.6502}},
  };
  for (const auto& [name, v] : items) {
    if (!same_4_digits(v.first, v.second)) {
      o.fail(fmtn("%s %.6g vs %.6g", name, v.first, v.second));
    }
  }
  return o;
}

Outcome ac3() {
  Outcome o;
  OptimizeOptions opt;
  opt.threads = default_threads();
  double worst = 0.0;
  for (std::size_t i = 0; i < kTableN.size(); ++i) {
    const int n = kTableN[i];
    const double tol = n <= 128 ? 0.02 : 0.10;
    const auto xi = optimize_xi(0.1, 1.0, n, kTheorem[i].m, opt);
    const auto full = optimize_full(0.1, 1.0, n, 10, opt);
    const double rx = xi.l2_error / kOptimalXiError[i] - 1.0;
    const double rf = full.l2_error / kOptimalFullError[i] - 1.0;
    worst = std::max({worst, std::abs(rx), std::abs(rf)});
    if (std::abs(rx) > tol) {
      o.fail(fmtn("N=%d optimal xi %.6g vs %.6g", n, xi.l2_error, kOptimalXiError[i]));
    }
    if (std::abs(rf) > tol) {
      o.fail(fmtn("N=%d optimal m=%d %.6g vs %.6g", n, full.m, full.l2_error, kOptimalFullError[i]));
    }
  }
  o.info(fmt("worst relative deviation %.3f", worst));
  return o;
}

Outcome ac4() {
  Outcome o;
  for (std::size_t i = 0; i < kTableN.size(); ++i) {
    const int n = kTableN[i];
    const double tol = n <= 256 ? 0.01 : 0.05;
    const double err = l2_error_exact(learned_rule(0.1, n, 1.0), 1.0).l2_error;
    if (std::abs(err / kLearnedError[i] - 1.0) > tol) {
      o.fail(fmtn("N=%d error %.6g vs %.6g", n, err, kLearnedError[i]));
    }
    const double pred = learned_error_prediction(0.1, n, 1.0);
    if (std::abs(pred - kLearnedBound[i]) > 5e-5) {
      o.fail(fmtn("N=%d prediction %.6g vs %.6g", n, pred, kLearnedBound[i]));
    }
  }
  return o;
}

Outcome ac5() {
  Outcome o;
  OptimizeOptions opt;
  opt.threads = default_threads();
  std::vector<int> nodes;
  for (int n = 1; n <= 256; n *= 2) {
    nodes.push_back(n);
  }
  const auto r = fit_learned_constants({0.1, 0.3}, nodes, 1.0, opt);
  o.info(fmtn("alpha %.4f beta %.4f", r.alpha_hat, r.beta_hat));
  if (!(r.alpha_hat >= 1.6 && r.alpha_hat <= 2.0)) {
    o.fail("alpha outside [1.6, 2.0]");
  }
  if (!(r.beta_hat >= 0.8 && r.beta_hat <= 1.0)) {
    o.fail("beta outside [0.8, 1.0]");
  }
  return o;
}

double rule_moment(const QuadratureRule& r, int k) {
  double acc = 0.0;
  for (int i = 0; i < r.level(); ++i) {
    acc += r.weights[i] * std::pow(r.nodes[i], k);
  }
  return acc;
}

Outcome ac6() {
  Outcome o;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> uh(0.01, 0.49);
  std::uniform_real_distribution<double> ua(std::log(1e-4), std::log(1e4));
  std::uniform_real_distribution<double> ur(std::log(1.01), std::log(20.0));
  std::uniform_real_distribution<double> ul(std::log(1e-4), std::log(1e4));
  std::uniform_int_distribution<int> um(1, 12);
  int bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double h = uh(rng);
    const double a = std::exp(ua(rng));
    const double b = a * std::exp(ur(rng));
    const int m = um(rng);
    const auto w = WeightFunction::fractional(h);
    const auto r = gauss_rule(w, a, b, m);
    bool ok = r.level() == m;
    for (int k = 0; ok && k <= 2 * m - 1; ++k) {
      const double exact = fractional_moment(h, a, b, k);
      ok = std::abs(rule_moment(r, k) - exact) <= 1e-9 * std::abs(exact);
    }
    for (int i = 0; ok && i < m; ++i) {
      ok = r.weights[i] > 0.0 && r.nodes[i] > a && r.nodes[i] < b;
    }
    const auto next = gauss_rule(w, a, b, m + 1);
    for (int i = 0; ok && i < m; ++i) {
      ok = next.nodes[i] < r.nodes[i] && r.nodes[i] < next.nodes[i + 1];
    }
    const double lambda = std::exp(ul(rng));
    const auto scaled = gauss_rule(w, lambda * a, lambda * b, m);
    for (int i = 0; ok && i < m; ++i) {
      ok = std::abs(scaled.nodes[i] / (lambda * r.nodes[i]) - 1.0) <= 1e-9 &&
           std::abs(scaled.weights[i] / (std::pow(lambda, 0.5 - h) * r.weights[i]) - 1.0) <= 1e-9;
    }
    if (!ok) {
      ++bad;
      if (bad <= 3) {
        o.fail(fmtn("H=%.3f [%.3g, %.3g] m=%d", h, a, b, m));
      }
    }
  }
  if (bad > 0) {
    o.info(fmtn("%d of 200 cases failed", bad));
  }
  return o;
}

Outcome ac7() {
  Outcome o;
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> uh(0.02, 0.48);
  std::uniform_real_distribution<double> ut(0.1, 10.0);
  std::uniform_int_distribution<int> uk(0, 60);
  std::uniform_real_distribution<double> ux(std::log(1e-3), std::log(1e6));
  std::uniform_real_distribution<double> uw(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double h = uh(rng);
    const double t = ut(rng);
    ExpKernelApprox a;
    a.hurst = h;
    a.nodes = {0.0};
    a.weights = {uw(rng)};
    const int k = uk(rng);
    std::vector<double> xs(k);
    for (auto& x : xs) {
      x = std::exp(ux(rng));
    }
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
      a.nodes.push_back(x);
      a.weights.push_back(uw(rng) * std::pow(x, 0.5 - h));
    }
    const double e = l2_error_exact(a, t).l2_error_sq;
    const double n = l2_error_numeric(a, t).l2_error_sq;
    const double rel = std::abs(e - n) / n;
    worst = std::max(worst, rel);
    if (rel > 1e-7) {
      o.fail(fmtn("H=%.3f T=%.3f K=%d rel %.3g", h, t, k, rel));
    }
  }
  o.info(fmt("worst relative difference %.2g", worst));
  return o;
}

Outcome ac8() {
  Outcome o;
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> uh(0.02, 0.48);
  std::uniform_real_distribution<double> ua(std::log(1e-3), std::log(1e3));
  std::uniform_real_distribution<double> ur(0.0, kTheoremAlpha * kTheoremBeta);
  std::uniform_real_distribution<double> ut(std::log(1e-2), std::log(1e2));
  std::uniform_int_distribution<int> um(1, 5);
  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (int trial = 0; trial < 200; ++trial) {
    const double h = uh(rng);
    const double a = std::exp(ua(rng));
    const double b = a * std::exp(ur(rng));
    const int m = um(rng);
    const double t = std::exp(ut(rng));
    const double c = fractional_weight_constant(h);
    auto f = [&](double x) { return c * std::exp(-t * x) * std::pow(x, -h - 0.5); };
    const double exact = gk::integrate(f, a, b, 12, 1e-13);
    const auto rule = gauss_rule(WeightFunction::fractional(h), a, b, m);
    double approx = 0.0;
    for (int i = 0; i < m; ++i) {
      approx += rule.weights[i] * std::exp(-t * rule.nodes[i]);
    }
    const double err = std::abs(exact - approx);
    // Below this the measured error is quadrature noise in the oracle.
    const double noise = 1e-13 * std::abs(exact);
    if (err > bound_single_interval(h, a, b, m, t) + noise) {
      o.fail(fmtn("interval H=%.3f [%.3g, %.3g] m=%d t=%.3g", h, a, b, m, t));
    }
  }
  std::uniform_int_distribution<int> un(1, 1024);
  int checked = 0;
  for (double h : {0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.48}) {
    for (int n : kTableN) {
      const double e = l2_error_exact(thm31_rule(h, n), 1.0).l2_error;
      if (e * e > bound_thm31(h, n, 1.0, 1.0)) {
        o.fail(fmtn("thm31 H=%.2f N=%d", h, n));
      }
      ++checked;
    }
  }
  for (int trial = 0; trial < 100; ++trial) {
    const double h = uh(rng);
    const int n = un(rng);
    const double e = l2_error_exact(thm31_rule(h, n), 1.0).l2_error;
    if (e * e > bound_thm31(h, n, 1.0, 1.0)) {
      o.fail(fmtn("thm31 H=%.3f N=%d", h, n));
    }
    ++checked;
  }
  o.info(fmtn("200 intervals, %d rules", checked));
  return o;
}

Outcome ac9() {
  Outcome o;
  const std::vector<std::pair<double, int>> cases{{0.1, 16}, {0.1, 64}, {0.3, 16}};
  std::uint64_t seed = 900;
  for (const auto& [h, n] : cases) {
    const auto rule = learned_rule(h, n, 1.0);
    const auto r = simulate_coupled_error(rule, 1.0, 64, 100000, seed++, default_threads());
    const double z = (r.mean_square - r.exact) / r.std_error;
    o.info(fmtn("H=%.1f N=%d z=%.2f", h, n, z));
    if (std::abs(z) > 4.0) {
      o.fail(fmtn("H=%.1f N=%d sample %.4g vs %.4g", h, n, r.mean_square, r.exact));
    }
  }
  return o;
}

double max_deviation(const SmileResult& a, const SmileResult& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.iv.size(); ++i) {
    d = std::max(d, std::abs(a.iv[i] - b.iv[i]));
  }
  return d;
}

Outcome ac10() {
  Outcome o;
  const RBergomiParams p;
  const int steps = 500;
  const int paths = 100000;
  const unsigned threads = default_threads();
  const auto k = log_moneyness_grid(-0.4, 0.2, 41);
  const std::vector<int> ns{1, 4, 16};
  std::vector<ExpKernelApprox> rules;
  for (int n : ns) {
    rules.push_back(learned_rule(p.hurst, n, p.maturity));
  }

  const auto coupled = simulate_terminal_coupled(p, rules, steps, paths, 1001, threads);
  const auto ref = smile_from_terminal(coupled[0].spot, p.spot, p.maturity, k);
  double prev = 1e300;
  for (std::size_t r = 0; r < ns.size(); ++r) {
    const auto s = smile_from_terminal(coupled[r + 1].spot, p.spot, p.maturity, k);
    const double d = max_deviation(s, ref);
    o.info(fmtn("N=%d max dev %.5f", ns[r], d));
    if (!(d < prev)) {
      o.fail(fmtn("max deviation not decreasing at N=%d", ns[r]));
    }
    prev = d;
  }

  // Independent N = 16 run against the reference.
  const auto s16 = simulate_smile(p, rules[2], steps, paths, k, 1002, threads);
  double worst = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double half = 0.5 * (ref.iv_hi[i] - ref.iv_lo[i]);
    const double ratio = std::abs(s16.iv[i] - ref.iv[i]) / half;
    worst = std::max(worst, ratio);
    if (ratio > 2.0) {
      o.fail(fmtn("k=%.3f N=16 %.5f vs %.5f", k[i], s16.iv[i], ref.iv[i]));
    }
  }
  o.info(fmt("N=16 worst %.2f half-widths", worst));

  const auto t16 = simulate_terminal(p, rules[2], steps, paths, 1003, threads);
  for (const auto* spots : {&t16.spot, &coupled[0].spot}) {
    const auto m = sample_mean(*spots);
    const double z = (m.mean - p.spot) / m.std_error;
    if (std::abs(z) > 5.0) {
      o.fail(fmt("martingale z=%.2f", z));
    }
  }
  return o;
}

Outcome ac11() {
  Outcome o;
  const RHestonParams p;
  const auto big = learned_rule(p.hurst, 1024, p.maturity);
  for (cplx z : {cplx(0.0), cplx(1.0)}) {
    const double a = std::abs(char_fn(p, RiccatiSolver::fractional_adams, nullptr, z, 500) - 1.0);
    const double m = std::abs(char_fn(p, RiccatiSolver::markovian_exp_pc, &big, z, 500) - 1.0);
    if (a > 1e-8 || m > 1e-8) {
      o.fail(fmtn("char_fn(%g) off by %.2g / %.2g", z.real(), a, m));
    }
  }

  // ψ at ζ = u + 2i, i.e. z = 2 - iu.
  const int psi_steps = 24000;
  double worst = 0.0;
  for (double u : {1.0, 5.0, 20.0}) {
    const cplx z(2.0, -u);
    const auto a = psi_fractional_adams(p, z, p.maturity, psi_steps);
    const auto m = psi_markovian_exp_pc(p, big, z, p.maturity, psi_steps);
    double sup = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      sup = std::max(sup, std::abs(a.values[i] - m.values[i]));
    }
    worst = std::max(worst, sup);
    if (sup > 1e-3) {
      o.fail(fmtn("psi u=%g sup %.3g", u, sup));
    }
  }
  o.info(fmt("psi sup %.2g", worst));

  // ν → 0 with θ = λ V0 keeps V at V0: Black-Scholes with vol √V0.
  RHestonParams flat = p;
  flat.nu = 1e-10;
  flat.theta = flat.lambda * flat.v0;
  const auto desk = FourierOptions::desk();
  const auto k = log_moneyness_grid(-0.5, 0.3, 81);
  const auto rule16 = learned_rule(p.hurst, 16, p.maturity);
  double price_gap = 0.0;
  for (auto solver : {RiccatiSolver::fractional_adams, RiccatiSolver::markovian_exp_pc}) {
    const auto* ap = solver == RiccatiSolver::markovian_exp_pc ? &rule16 : nullptr;
    const auto s = heston_smile(flat, solver, ap, k, desk);
    for (std::size_t i = 0; i < k.size(); ++i) {
      const double bs = bs_call(flat.spot, flat.spot * std::exp(k[i]), std::sqrt(flat.v0 * flat.maturity));
      price_gap = std::max(price_gap, std::abs(s.prices[i] - bs));
    }
  }
  o.info(fmt("closed-form gap %.2g", price_gap));
  if (price_gap > 1e-6) {
    o.fail(fmt("deterministic-vol price gap %.3g", price_gap));
  }

  const auto ref = heston_smile(p, RiccatiSolver::fractional_adams, nullptr, k, desk);
  double prev = 1e300;
  for (int n : {1, 2, 4, 8, 16}) {
    const auto rule = learned_rule(p.hurst, n, p.maturity);
    const auto s = heston_smile(p, RiccatiSolver::markovian_exp_pc, &rule, k, desk);
    const double err = smile_err(k, ref.iv, s.iv);
    o.info(fmtn("err(%d)=%.3g", n, err));
    if (!(err < prev)) {
      o.fail(fmtn("smile_err not decreasing at N=%d", n));
    }
    prev = err;
  }
  if (prev > 1e-3) {
    o.fail(fmt("smile_err(16) %.3g", prev));
  }
  return o;
}

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + ROUGHKIT_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome ac12() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "roughkit_acceptance";
  fs::remove_all(root);
  struct Job {
    std::string name;
    std::string args;
    std::vector<std::string> files;
  };
  const std::vector<Job> jobs{
      {"fbm", "fbm --N 16 --rule learned --steps 64 --paths 200 --seed 11 --out @/paths.csv",
       {"paths.csv"}},
      {"bergomi",
       "smile --model bergomi --N 1,16 --paths 4000 --steps 64 --seed 12 --out @",
       {"bergomi_ref.csv", "bergomi_N1.csv", "bergomi_N16.csv"}},
      {"heston", "smile --model heston --N 2,8 --out @",
       {"heston_ref.csv", "heston_N2.csv", "heston_N8.csv", "heston_err.csv"}},
      {"nodes", "nodes --H 0.1 --N 64 --rule optimized --out @/nodes.csv", {"nodes.csv"}},
  };
  for (const auto& job : jobs) {
    std::vector<std::string> runs;
    for (const char* variant : {"t1a", "t1b", "t4"}) {
      const fs::path dir = root / job.name / variant;
      fs::create_directories(dir);
      std::string args = job.args;
      args.replace(args.find('@'), 1, dir.string());
      args += std::string(" --threads ") + (variant[1] == '4' ? "4" : "1");
      if (run_cli(args) != 0) {
        o.fail(job.name + " run failed");
        continue;
      }
      std::string bytes;
      for (const auto& f : job.files) {
        bytes += slurp(dir / f) + '\x1f';
      }
      runs.push_back(bytes);
    }
    if (runs.size() == 3 && !(runs[0] == runs[1] && runs[0] == runs[2])) {
      o.fail(job.name + " output differs");
    }
  }
  fs::remove_all(root);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "theorem rule columns at H=0.1", ac1},
      {2, "corollary coefficients at H=0.1", ac2},
      {3, "optimized errors", ac3},
      {4, "learned rule errors and predictions", ac4},
      {5, "learned constants refit (reduced grid)", ac5},
      {6, "quadrature properties", ac6},
      {7, "exact error against quadrature", ac7},
      {8, "bound validity", ac8},
      {9, "fBm strong error against the exact L2 error", ac9},
      {10, "rough Bergomi smiles", ac10},
      {11, "rough Heston", ac11},
      {12, "CLI determinism across threads and reruns", ac12},
  };
  // --report FILE keeps a copy of the verdict lines.
  std::string report_path;
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--report" && i + 1 < argc) {
      report_path = argv[++i];
    } else {
      selected.insert(std::atoi(argv[i]));
    }
  }
  std::string report;
  int passed = 0;
  int ran = 0;
  for (const auto& c : all) {
    if (!selected.empty() && selected.count(c.id) == 0) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string detail;
    for (const auto& n : o.notes) {
      detail += (detail.empty() ? "" : "; ") + n;
    }
    char head[160];
    std::snprintf(head, sizeof head, "AC%02d %s %s", c.id, o.pass ? "PASS" : "FAIL", c.name);
    const std::string line = std::string(head) + (detail.empty() ? "" : " (" + detail + ")") +
                             fmt(" [%.1fs]", secs) + "\n";
    std::fputs(line.c_str(), stdout);
    std::fflush(stdout);
    report += line;
    ++ran;
    passed += o.pass ? 1 : 0;
  }
  const std::string summary = std::to_string(passed) + "/" + std::to_string(ran) + " criteria passed\n";
  std::fputs(summary.c_str(), stdout);
  if (!report_path.empty()) {
    std::ofstream(report_path) << report << summary;
  }
  return 0;
}
