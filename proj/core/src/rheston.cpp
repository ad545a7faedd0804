#include "rough/rheston.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include "rough/fbm.hpp"
#include "rough/parallel.hpp"
#include "rough/specfun.hpp"

namespace rough {
namespace {

constexpr double kDivergence = 1e8;

void check_steps(double horizon, int nsteps, int min_steps) {
  if (!(horizon > 0.0)) {
    throw std::domain_error("riccati: horizon must be positive");
  }
  if (nsteps < min_steps) {
    throw std::domain_error("riccati: need at least " + std::to_string(min_steps) + " steps");
  }
}

void guard(cplx value, int step) {
  if (!(std::abs(value) <= kDivergence)) {
    throw RiccatiDivergence("riccati: |psi| exceeded 1e8 at step " + std::to_string(step) +
                            " (moment explosion)");
  }
}

std::vector<double> uniform_times(double horizon, int nsteps) {
  std::vector<double> t(nsteps + 1);
  for (int k = 0; k <= nsteps; ++k) {
    t[k] = horizon * k / nsteps;
  }
  return t;
}

}  // namespace

void RHestonParams::validate() const {
  if (!(spot > 0.0) || !(v0 > 0.0) || !(maturity > 0.0)) {
    throw std::domain_error("rheston: spot, V0 and T must be positive");
  }
  if (!(theta >= 0.0) || !(lambda >= 0.0) || !(nu > 0.0)) {
    throw std::domain_error("rheston: need theta >= 0, lambda >= 0, nu > 0");
  }
  if (!(std::abs(rho) < 1.0)) {
    throw std::domain_error("rheston: need |rho| < 1");
  }
  if (!(hurst > 0.0 && hurst < 0.5)) {
    throw std::domain_error("rheston: H must lie in (0, 1/2)");
  }
}

std::string_view to_string(RiccatiSolver solver) {
  return solver == RiccatiSolver::fractional_adams ? "fractional_adams" : "markovian_exp_pc";
}

cplx riccati_f(const RHestonParams& params, cplx z, cplx x) {
  const double rho_nu = params.rho * params.nu;
  const cplx constant = 0.5 * (z * z - z);
  if (params.form == RiccatiForm::lambda_scaled) {
    const double ln = params.lambda * params.nu;
    return constant + params.lambda * (rho_nu * z - 1.0) * x + 0.5 * ln * ln * x * x;
  }
  return constant + (rho_nu * z - params.lambda) * x + 0.5 * params.nu * params.nu * x * x;
}

RiccatiSolution psi_fractional_adams(const RHestonParams& params, cplx z, double horizon,
                                     int nsteps) {
  check_steps(horizon, nsteps, 2);
  const double alpha = params.hurst + 0.5;
  const double dt = horizon / nsteps;
  const double pred_scale = std::pow(dt, alpha) / gamma_fn(alpha + 1.0);
  const double corr_scale = std::pow(dt, alpha) / gamma_fn(alpha + 2.0);

  // b[m] = (m+1)^α - m^α, c[m] = (m+2)^(α+1) + m^(α+1) - 2(m+1)^(α+1)
  std::vector<double> pw(nsteps + 2);
  std::vector<double> pw1(nsteps + 2);
  for (int m = 0; m <= nsteps + 1; ++m) {
    pw[m] = std::pow(static_cast<double>(m), alpha);
    pw1[m] = std::pow(static_cast<double>(m), alpha + 1.0);
  }
  std::vector<double> b(nsteps);
  std::vector<double> c(nsteps);
  for (int m = 0; m < nsteps; ++m) {
    b[m] = pw[m + 1] - pw[m];
    c[m] = pw1[m + 2] + pw1[m] - 2.0 * pw1[m + 1];
  }

  RiccatiSolution out;
  out.solver = RiccatiSolver::fractional_adams;
  out.z = z;
  out.times = uniform_times(horizon, nsteps);
  out.values.assign(nsteps + 1, cplx{});
  std::vector<cplx> f(nsteps + 1);
  f[0] = riccati_f(params, z, 0.0);
  for (int k = 0; k < nsteps; ++k) {
    cplx pred{};
    cplx corr = (pw1[k] - (k - alpha) * pw[k + 1]) * f[0];
    for (int j = 0; j <= k; ++j) {
      pred += b[k - j] * f[j];
    }
    for (int j = 1; j <= k; ++j) {
      corr += c[k - j] * f[j];
    }
    pred *= pred_scale;
    const cplx next = corr_scale * (corr + riccati_f(params, z, pred));
    guard(next, k + 1);
    out.values[k + 1] = next;
    f[k + 1] = riccati_f(params, z, next);
  }
  return out;
}

RiccatiSolution psi_markovian_exp_pc(const RHestonParams& params, const ExpKernelApprox& approx,
                                     cplx z, double horizon, int nsteps) {
  check_steps(horizon, nsteps, 1);
  if (approx.size() == 0) {
    throw std::invalid_argument("psi_markovian_exp_pc: empty approximation");
  }
  const double dt = horizon / nsteps;
  const std::size_t n = approx.size();
  std::vector<double> gain(n);
  std::vector<double> decay(n);
  for (std::size_t i = 0; i < n; ++i) {
    gain[i] = decay_integral(approx.nodes[i], dt);
    decay[i] = std::exp(-approx.nodes[i] * dt);
  }

  RiccatiSolution out;
  out.solver = RiccatiSolver::markovian_exp_pc;
  out.z = z;
  out.times = uniform_times(horizon, nsteps);
  out.values.assign(nsteps + 1, cplx{});
  std::vector<cplx> factor(n);
  cplx agg{};
  for (int k = 0; k < nsteps; ++k) {
    const cplx f_now = riccati_f(params, z, agg);
    cplx pred_sum{};
    for (std::size_t i = 0; i < n; ++i) {
      pred_sum += approx.weights[i] * (f_now * gain[i] + factor[i] * decay[i]);
    }
    const cplx f_mid = riccati_f(params, z, 0.5 * (agg + pred_sum));
    agg = cplx{};
    for (std::size_t i = 0; i < n; ++i) {
      factor[i] = f_mid * gain[i] + factor[i] * decay[i];
      agg += approx.weights[i] * factor[i];
    }
    guard(agg, k + 1);
    out.values[k + 1] = agg;
  }
  return out;
}

cplx char_fn(const RHestonParams& params, RiccatiSolver solver, const ExpKernelApprox* approx,
             cplx z, int nsteps) {
  params.validate();
  const double horizon = params.maturity;
  RiccatiSolution psi;
  if (solver == RiccatiSolver::fractional_adams) {
    psi = psi_fractional_adams(params, z, horizon, nsteps);
  } else {
    if (approx == nullptr) {
      throw std::invalid_argument("char_fn: the Markovian solver needs a kernel approximation");
    }
    psi = psi_markovian_exp_pc(params, *approx, z, horizon, nsteps);
  }

  const double alpha = params.hurst + 0.5;
  const double g_scale = 1.0 / gamma_fn(alpha + 1.0);
  auto g = [&](double t) {
    if (solver == RiccatiSolver::fractional_adams) {
      return params.v0 + params.theta * std::pow(t, alpha) * g_scale;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < approx->size(); ++i) {
      acc += approx->weights[i] * decay_integral(approx->nodes[i], t);
    }
    return params.v0 + params.theta * acc;
  };

  const double dt = horizon / nsteps;
  cplx sum{};
  for (int k = 0; k <= nsteps; ++k) {
    const double weight = (k == 0 || k == nsteps) ? 0.5 : 1.0;
    sum += weight * riccati_f(params, z, psi.values[nsteps - k]) * g(psi.times[k]);
  }
  return std::exp(dt * sum);
}

cplx payoff_transform(cplx zeta, double strike) {
  if (!(strike > 0.0)) {
    throw std::domain_error("payoff_transform: strike must be positive");
  }
  if (!(zeta.imag() > 1.0)) {
    throw std::domain_error("payoff_transform: need Im zeta > 1");
  }
  const cplx iz = cplx(0.0, 1.0) * zeta;
  return std::exp((iz + 1.0) * std::log(strike)) / (iz * (iz + 1.0));
}

PhiGrid phi_grid(const RHestonParams& params, RiccatiSolver solver, const ExpKernelApprox* approx,
                 const FourierOptions& options) {
  params.validate();
  if (!(options.damping > 1.0)) {
    throw std::domain_error("fourier: damping R must exceed 1");
  }
  if (options.grid < 2 || !(options.umax > 0.0)) {
    throw std::domain_error("fourier: need at least two grid points and umax > 0");
  }
  const int n = options.grid;
  PhiGrid out;
  out.damping = options.damping;
  out.u.resize(n);
  out.phi.resize(n);
  for (int j = 0; j < n; ++j) {
    out.u[j] = -options.umax + 2.0 * options.umax * j / (n - 1);
  }
  // The grid is symmetric; solve for u >= 0 and mirror with φ(-u) = conj φ(u).
  const int first = n / 2;
  parallel_for(static_cast<std::size_t>(n - first), options.threads, [&](std::size_t idx) {
    const int j = first + static_cast<int>(idx);
    const double u = j == first && n % 2 == 1 ? 0.0 : out.u[j];
    out.phi[j] = char_fn(params, solver, approx, cplx(options.damping, -u), options.riccati_steps);
  });
  for (int j = 0; j < first; ++j) {
    out.phi[j] = std::conj(out.phi[n - 1 - j]);
  }
  return out;
}

double fourier_call(const PhiGrid& grid, double spot, double k, double* imag_part) {
  const std::size_t n = grid.u.size();
  if (n < 2) {
    throw std::invalid_argument("fourier_call: empty grid");
  }
  const double strike = std::exp(k);
  const double h = grid.u[1] - grid.u[0];
  cplx sum{};
  for (std::size_t j = 0; j < n; ++j) {
    const double weight = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    sum += weight * grid.phi[j] * payoff_transform(cplx(grid.u[j], grid.damping), strike);
  }
  const cplx price = spot * h * sum / (2.0 * std::numbers::pi);
  if (imag_part != nullptr) {
    *imag_part = price.imag();
  }
  return price.real();
}

double fourier_call(const RHestonParams& params, RiccatiSolver solver,
                    const ExpKernelApprox* approx, double k, const FourierOptions& options) {
  return fourier_call(phi_grid(params, solver, approx, options), params.spot, k);
}

SmileResult heston_smile(const PhiGrid& grid, const RHestonParams& params,
                         const std::vector<double>& log_moneyness) {
  SmileResult out;
  out.log_moneyness = log_moneyness;
  for (double k : log_moneyness) {
    const double strike = params.spot * std::exp(k);
    const double price = fourier_call(grid, params.spot, k);
    const double intrinsic = std::max(params.spot - strike, 0.0);
    const double vol =
        implied_vol(std::clamp(price, intrinsic, params.spot), params.spot, strike, params.maturity);
    out.prices.push_back(price);
    out.iv.push_back(vol);
    out.iv_lo.push_back(vol);
    out.iv_hi.push_back(vol);
    out.price_se.push_back(0.0);
  }
  return out;
}

SmileResult heston_smile(const RHestonParams& params, RiccatiSolver solver,
                         const ExpKernelApprox* approx, const std::vector<double>& log_moneyness,
                         const FourierOptions& options) {
  SmileResult out = heston_smile(phi_grid(params, solver, approx, options), params, log_moneyness);
  out.steps = options.riccati_steps;
  return out;
}

void write_phi_csv(std::ostream& out, const PhiGrid& grid) {
  out << "u,re,im\n";
  char buf[96];
  for (std::size_t j = 0; j < grid.u.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.u[j], grid.phi[j].real(),
                  grid.phi[j].imag());
    out << buf;
  }
}

}  // namespace rough
