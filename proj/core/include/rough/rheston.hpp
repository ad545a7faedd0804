#pragma once

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "rough/kernel.hpp"
#include "rough/smile.hpp"

namespace rough {

using cplx = std::complex<double>;

enum class RiccatiForm {
  // ½(z²-z) + (ρνz - λ)x + (ν²/2)x²
  standard,
  // ½(z²-z) + λ(ρνz - 1)x + ((λν)²/2)x², the parametrization in which the
  // kernel carries the mean-reversion speed.
  lambda_scaled,
};

struct RHestonParams {
  double spot = 1.0;
  double v0 = 0.02;
  double theta = 0.02;
  double lambda = 0.3;
  double nu = 0.3;
  double rho = -0.7;
  double hurst = 0.1;
  double maturity = 1.0;
  RiccatiForm form = RiccatiForm::standard;

  void validate() const;
};

class RiccatiDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RiccatiSolver { fractional_adams, markovian_exp_pc };

std::string_view to_string(RiccatiSolver solver);

struct RiccatiSolution {
  std::vector<double> times;
  std::vector<cplx> values;
  RiccatiSolver solver = RiccatiSolver::fractional_adams;
  cplx z;
};

cplx riccati_f(const RHestonParams& params, cplx z, cplx x);

/// ψ = G * F(z, ψ) by the fractional Adams-Bashforth-Moulton scheme of order
/// H + 1/2. O(nsteps²).
RiccatiSolution psi_fractional_adams(const RHestonParams& params, cplx z, double horizon,
                                     int nsteps);

/// ψ̂ = Σ w_i ψ^{x_i}, ∂_t ψ^x = -x ψ^x + F(z, ψ̂), integrating the decay
/// exactly and F by a predictor-corrector step.
RiccatiSolution psi_markovian_exp_pc(const RHestonParams& params, const ExpKernelApprox& approx,
                                     cplx z, double horizon, int nsteps);

/// E exp(z log(S_T / S_0)) at T = params.maturity. `approx` is required for
/// the Markovian solver and ignored otherwise.
cplx char_fn(const RHestonParams& params, RiccatiSolver solver, const ExpKernelApprox* approx,
             cplx z, int nsteps);

/// Fourier transform ∫ e^{iζx} (e^x - K)^+ dx = K^{iζ+1} / (iζ (iζ+1)), Im ζ > 1.
cplx payoff_transform(cplx zeta, double strike);

struct FourierOptions {
  double damping = 2.0;
  double umax = 50.0;
  int grid = 2000;
  int riccati_steps = 500;
  unsigned threads = 1;

  static FourierOptions desk() { return {}; }
  static FourierOptions paper() { return {2.0, 50.0, 10000, 3000, 1}; }
};

struct PhiGrid {
  std::vector<double> u;
  // E exp(z X) at z = R - iu, X = log(S_T / S_0).
  std::vector<cplx> phi;
  double damping = 2.0;
};

PhiGrid phi_grid(const RHestonParams& params, RiccatiSolver solver, const ExpKernelApprox* approx,
                 const FourierOptions& options);

/// Call price for log-moneyness k from a precomputed grid, trapezoid over
/// [-umax, umax]. `imag_part` receives the discarded imaginary part.
double fourier_call(const PhiGrid& grid, double spot, double k, double* imag_part = nullptr);

double fourier_call(const RHestonParams& params, RiccatiSolver solver,
                    const ExpKernelApprox* approx, double k, const FourierOptions& options);

SmileResult heston_smile(const RHestonParams& params, RiccatiSolver solver,
                         const ExpKernelApprox* approx, const std::vector<double>& log_moneyness,
                         const FourierOptions& options);

SmileResult heston_smile(const PhiGrid& grid, const RHestonParams& params,
                         const std::vector<double>& log_moneyness);

/// Header `u,re,im`.
void write_phi_csv(std::ostream& out, const PhiGrid& grid);

}  // namespace rough
