#include "rough/rbergomi.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "rough/fbm.hpp"
#include "rough/integrate.hpp"
#include "rough/parallel.hpp"
#include "rough/rng.hpp"
#include "rough/specfun.hpp"

namespace rough {
namespace {

constexpr std::size_t kBlock = 256;
constexpr int kMaxReferenceSteps = 1024;
constexpr std::uint32_t kDriverStream = 1;
constexpr std::uint32_t kResidualStream = 2;

void check_grid(int steps, int paths) {
  if (steps < 1 || paths < 1) {
    throw std::domain_error("rbergomi: steps and paths must be at least 1");
  }
}

std::size_t block_count(int paths) {
  return (static_cast<std::size_t>(paths) + kBlock - 1) / kBlock;
}

// Driver stream: (z_W, z_B) per step. Residual stream: everything the
// scheme needs beyond ΔW. Different schemes fed the same seed therefore share
// their Brownian drivers.
class PathStreams {
 public:
  PathStreams(std::uint64_t seed, std::size_t path)
      : driver_engine_(path_engine(seed, path, kDriverStream)),
        residual_engine_(path_engine(seed, path, kResidualStream)) {}

  double driver() { return driver_normal_(driver_engine_); }
  double residual() { return residual_normal_(residual_engine_); }

 private:
  std::mt19937_64 driver_engine_;
  std::mt19937_64 residual_engine_;
  std::normal_distribution<double> driver_normal_;
  std::normal_distribution<double> residual_normal_;
};

// ∫_0^t G(v) e^{-xv} dv
double damped_kernel_integral(double hurst, double x, double t) {
  const double p = hurst + 0.5;
  if (x == 0.0) {
    return std::pow(t, p) / gamma_fn(p + 1.0);
  }
  return std::pow(x, -p) * lower_incomplete_gamma(p, x * t) / gamma_fn(p);
}

// ∫_0^t G(d + r) e^{-xr} dr for d > 0
double shifted_kernel_integral(double hurst, double x, double d, double t) {
  const double p = hurst + 0.5;
  if (x == 0.0) {
    return (std::pow(d + t, p) - std::pow(d, p)) / gamma_fn(p + 1.0);
  }
  auto f = [&](double v) { return std::pow(d + v / x, hurst - 0.5) * std::exp(-v); };
  return integrate_gk15(f, 0.0, std::min(x * t, 60.0), 1e-16, 1e-12).value / (x * gamma_fn(p));
}

// Rows: ΔW_0..ΔW_{m-1}, then X(t_1..t_{m-1}), then X̂_r(t_1..t_{m-1}) per rule.
Eigen::MatrixXd joint_covariance(double hurst, double dt, int m,
                                 const std::vector<ExpKernelApprox>& rules) {
  const int nr = static_cast<int>(rules.size());
  const Eigen::Index dim = m + static_cast<Eigen::Index>(nr + 1) * (m - 1);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  auto x_row = [&](int i) { return static_cast<Eigen::Index>(m + i - 1); };
  auto hat_row = [&](int r, int i) {
    return static_cast<Eigen::Index>(m) + static_cast<Eigen::Index>(r + 1) * (m - 1) + i - 1;
  };
  auto set = [&](Eigen::Index a, Eigen::Index b, double v) { cov(a, b) = cov(b, a) = v; };

  for (int j = 0; j < m; ++j) {
    cov(j, j) = dt;
  }
  for (int i = 1; i < m; ++i) {
    const double ti = i * dt;
    for (int j = 0; j < i; ++j) {
      set(x_row(i), j, rl_fbm_increment_covariance(hurst, ti, j * dt, (j + 1) * dt));
    }
    for (int l = 1; l <= i; ++l) {
      set(x_row(i), x_row(l), rl_fbm_covariance(hurst, ti, l * dt));
    }
  }

  // mixed[a][b](l, k) = Σ_k' D(x^a_k + x^b_k', t_l) w^b_k'
  std::vector<std::vector<Eigen::MatrixXd>> mixed(nr, std::vector<Eigen::MatrixXd>(nr));
  for (int a = 0; a < nr; ++a) {
    for (int b = 0; b < nr; ++b) {
      const auto& ra = rules[a];
      const auto& rb = rules[b];
      Eigen::MatrixXd u = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(ra.size()));
      for (int l = 1; l < m; ++l) {
        for (std::size_t k = 0; k < ra.size(); ++k) {
          double acc = 0.0;
          for (std::size_t q = 0; q < rb.size(); ++q) {
            acc += decay_integral(ra.nodes[k] + rb.nodes[q], l * dt) * rb.weights[q];
          }
          u(l, static_cast<Eigen::Index>(k)) = acc;
        }
      }
      mixed[a][b] = std::move(u);
    }
  }
  // Cov(X̂_a(t_i), X̂_b(t_l)) for t_i >= t_l.
  auto hat_hat = [&](int a, int i, int b, int l) {
    const auto& ra = rules[a];
    double acc = 0.0;
    for (std::size_t k = 0; k < ra.size(); ++k) {
      acc += ra.weights[k] * std::exp(-ra.nodes[k] * (i - l) * dt) *
             mixed[a][b](l, static_cast<Eigen::Index>(k));
    }
    return acc;
  };

  for (int r = 0; r < nr; ++r) {
    const auto& rule = rules[r];
    for (int i = 1; i < m; ++i) {
      const double ti = i * dt;
      for (int j = 0; j < i; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) {
          acc += rule.weights[k] * std::exp(-rule.nodes[k] * (ti - (j + 1) * dt)) *
                 decay_integral(rule.nodes[k], dt);
        }
        set(hat_row(r, i), j, acc);
      }
      for (int l = 1; l < m; ++l) {
        const double tl = l * dt;
        double acc = 0.0;
        for (std::size_t k = 0; k < rule.size(); ++k) {
          const double x = rule.nodes[k];
          if (l >= i) {
            acc += rule.weights[k] * std::exp(-x * (tl - ti)) * damped_kernel_integral(hurst, x, ti);
          } else {
            acc += rule.weights[k] * shifted_kernel_integral(hurst, x, ti - tl, tl);
          }
        }
        set(x_row(i), hat_row(r, l), acc);
      }
      for (int s = 0; s <= r; ++s) {
        for (int l = 1; l < m; ++l) {
          if (s == r && l > i) {
            continue;
          }
          const double c = i >= l ? hat_hat(r, i, s, l) : hat_hat(s, l, r, i);
          set(hat_row(r, i), hat_row(s, l), c);
        }
      }
    }
  }
  return cov;
}

std::vector<int> variance_checkpoints(int steps) {
  std::vector<int> out;
  for (int q = 1; q <= 3; ++q) {
    out.push_back(std::clamp(static_cast<int>(std::lround(steps * q / 4.0)), 0, steps - 1));
  }
  return out;
}

void finish_variance_stats(TerminalSample& sample, const std::vector<int>& checkpoints,
                           const std::vector<double>& recorded, int paths, double dt) {
  const std::size_t count = checkpoints.size();
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<double> column(paths);
    for (int p = 0; p < paths; ++p) {
      column[p] = recorded[static_cast<std::size_t>(p) * count + c];
    }
    const MeanEstimate est = sample_mean(column);
    sample.variance_times.push_back(checkpoints[c] * dt);
    sample.variance_mean.push_back(est.mean);
    sample.variance_se.push_back(est.std_error);
  }
}

[[noreturn]] void overflow(std::size_t path, int step, double variance) {
  throw std::overflow_error("rbergomi: non-finite state on path " + std::to_string(path) +
                            " at step " + std::to_string(step) + " (V = " +
                            std::to_string(variance) + "); eta or H too extreme for this grid");
}

}  // namespace

void RBergomiParams::validate() const {
  if (!(spot > 0.0) || !(v0 > 0.0) || !(maturity > 0.0)) {
    throw std::domain_error("rbergomi: spot, V0 and T must be positive");
  }
  if (!(eta >= 0.0)) {
    throw std::domain_error("rbergomi: eta must be nonnegative");
  }
  if (!(std::abs(rho) <= 1.0)) {
    throw std::domain_error("rbergomi: need |rho| <= 1");
  }
  if (!(hurst > 0.0 && hurst < 0.5)) {
    throw std::domain_error("rbergomi: H must lie in (0, 1/2)");
  }
}

double variance_compensator(const ExpKernelApprox& approx, double t) {
  return squared_kernel_integral(approx, t);
}

TerminalSample simulate_terminal(const RBergomiParams& params, const ExpKernelApprox& approx,
                                 int steps, int paths, std::uint64_t seed, unsigned threads) {
  params.validate();
  check_grid(steps, paths);
  const double dt = params.maturity / steps;
  const double sqrt_dt = std::sqrt(dt);
  const StepCovariance cov = step_covariance(approx.nodes, dt);
  const auto k = static_cast<Eigen::Index>(approx.size());
  Eigen::VectorXd decay(k);
  Eigen::VectorXd weights(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    decay(i) = std::exp(-approx.nodes[i] * dt);
    weights(i) = approx.weights[i];
  }

  // The rule approximates t^(H-1/2) / Γ(H+1/2), hence the Γ(H+1/2) factor.
  const double scale = params.eta * std::sqrt(2.0 * params.hurst) * gamma_fn(params.hurst + 0.5);
  std::vector<double> comp(steps);
  for (int j = 0; j < steps; ++j) {
    comp[j] = 0.5 * scale * scale * variance_compensator(approx, j * dt);
  }
  const double rho = params.rho;
  const double rho_bar = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  const std::vector<int> checkpoints = variance_checkpoints(steps);
  const std::size_t nchk = checkpoints.size();

  TerminalSample out;
  out.spot.resize(paths);
  std::vector<double> recorded(static_cast<std::size_t>(paths) * nchk);

  parallel_for(block_count(paths), threads, [&](std::size_t block) {
    const std::size_t begin = block * kBlock;
    const auto width = static_cast<Eigen::Index>(std::min<std::size_t>(kBlock, paths - begin));
    std::vector<PathStreams> streams;
    streams.reserve(width);
    for (Eigen::Index b = 0; b < width; ++b) {
      streams.emplace_back(seed, begin + b);
    }
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(k, width);
    Eigen::MatrixXd z(k + 1, width);
    Eigen::VectorXd zb(width);
    Eigen::VectorXd v(width);
    Eigen::VectorXd log_s = Eigen::VectorXd::Constant(width, std::log(params.spot));
    for (int j = 0; j < steps; ++j) {
      const Eigen::RowVectorXd level = weights.transpose() * y;
      for (Eigen::Index b = 0; b < width; ++b) {
        v(b) = params.v0 * std::exp(scale * level(b) - comp[j]);
        z(0, b) = streams[b].driver();
        zb(b) = streams[b].driver();
        for (Eigen::Index i = 1; i <= k; ++i) {
          z(i, b) = streams[b].residual();
        }
      }
      const Eigen::MatrixXd innov = cov.cholesky.triangularView<Eigen::Lower>() * z;
      for (Eigen::Index b = 0; b < width; ++b) {
        log_s(b) += std::sqrt(v(b)) * (rho * innov(0, b) + rho_bar * sqrt_dt * zb(b)) - 0.5 * v(b) * dt;
        if (!std::isfinite(log_s(b)) || !std::isfinite(v(b))) {
          overflow(begin + b, j, v(b));
        }
        for (std::size_t c = 0; c < nchk; ++c) {
          if (j == checkpoints[c]) {
            recorded[(begin + b) * nchk + c] = v(b);
          }
        }
      }
      y = decay.asDiagonal() * y + innov.bottomRows(k);
    }
    for (Eigen::Index b = 0; b < width; ++b) {
      out.spot[begin + b] = std::exp(log_s(b));
    }
  });
  finish_variance_stats(out, checkpoints, recorded, paths, dt);
  return out;
}

std::vector<TerminalSample> simulate_terminal_coupled(const RBergomiParams& params,
                                                      const std::vector<ExpKernelApprox>& rules,
                                                      int steps, int paths, std::uint64_t seed,
                                                      unsigned threads) {
  params.validate();
  check_grid(steps, paths);
  if (steps > kMaxReferenceSteps) {
    throw std::length_error("rbergomi reference: at most 1024 steps (dense Cholesky)");
  }
  const double h = params.hurst;
  const double dt = params.maturity / steps;
  const double sqrt_dt = std::sqrt(dt);
  const int m = steps;
  const int models = static_cast<int>(rules.size()) + 1;
  const Eigen::MatrixXd factor = jittered_cholesky(joint_covariance(h, dt, m, rules)).factor;
  const auto dim = factor.rows();

  const double scale = params.eta * std::sqrt(2.0 * h) * gamma_fn(h + 0.5);
  std::vector<std::vector<double>> comp(models, std::vector<double>(m));
  for (int j = 0; j < m; ++j) {
    comp[0][j] = 0.5 * params.eta * params.eta * std::pow(j * dt, 2.0 * h);
    for (int r = 1; r < models; ++r) {
      comp[r][j] = 0.5 * scale * scale * variance_compensator(rules[r - 1], j * dt);
    }
  }
  const double rho = params.rho;
  const double rho_bar = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  const std::vector<int> checkpoints = variance_checkpoints(steps);
  const std::size_t nchk = checkpoints.size();

  std::vector<TerminalSample> out(models);
  std::vector<std::vector<double>> recorded(models);
  for (int r = 0; r < models; ++r) {
    out[r].spot.resize(paths);
    recorded[r].resize(static_cast<std::size_t>(paths) * nchk);
  }

  parallel_for(block_count(paths), threads, [&](std::size_t block) {
    const std::size_t begin = block * kBlock;
    const auto width = static_cast<Eigen::Index>(std::min<std::size_t>(kBlock, paths - begin));
    Eigen::MatrixXd z(dim, width);
    Eigen::MatrixXd zb(m, width);
    for (Eigen::Index b = 0; b < width; ++b) {
      PathStreams streams(seed, begin + b);
      for (int j = 0; j < m; ++j) {
        z(j, b) = streams.driver();
        zb(j, b) = streams.driver();
      }
      for (Eigen::Index i = m; i < dim; ++i) {
        z(i, b) = streams.residual();
      }
    }
    const Eigen::MatrixXd x = factor.triangularView<Eigen::Lower>() * z;
    for (int r = 0; r < models; ++r) {
      const Eigen::Index offset = m + static_cast<Eigen::Index>(r) * (m - 1) - 1;
      for (Eigen::Index b = 0; b < width; ++b) {
        const std::size_t path = begin + b;
        double log_s = std::log(params.spot);
        for (int j = 0; j < m; ++j) {
          const double v = j == 0 ? params.v0 : params.v0 * std::exp(scale * x(offset + j, b) - comp[r][j]);
          log_s += std::sqrt(v) * (rho * x(j, b) + rho_bar * sqrt_dt * zb(j, b)) - 0.5 * v * dt;
          if (!std::isfinite(log_s) || !std::isfinite(v)) {
            overflow(path, j, v);
          }
          for (std::size_t c = 0; c < nchk; ++c) {
            if (j == checkpoints[c]) {
              recorded[r][path * nchk + c] = v;
            }
          }
        }
        out[r].spot[path] = std::exp(log_s);
      }
    }
  });
  for (int r = 0; r < models; ++r) {
    finish_variance_stats(out[r], checkpoints, recorded[r], paths, dt);
  }
  return out;
}

TerminalSample simulate_terminal_reference(const RBergomiParams& params, int steps, int paths,
                                           std::uint64_t seed, unsigned threads) {
  return std::move(simulate_terminal_coupled(params, {}, steps, paths, seed, threads).front());
}

SmileResult simulate_smile(const RBergomiParams& params, const ExpKernelApprox& approx, int steps,
                           int paths, const std::vector<double>& log_moneyness,
                           std::uint64_t seed, unsigned threads) {
  const TerminalSample sample = simulate_terminal(params, approx, steps, paths, seed, threads);
  SmileResult out = smile_from_terminal(sample.spot, params.spot, params.maturity, log_moneyness);
  out.steps = steps;
  out.seed = seed;
  return out;
}

SmileResult reference_smile(const RBergomiParams& params, int steps, int paths,
                            const std::vector<double>& log_moneyness, std::uint64_t seed,
                            unsigned threads) {
  const TerminalSample sample = simulate_terminal_reference(params, steps, paths, seed, threads);
  SmileResult out = smile_from_terminal(sample.spot, params.spot, params.maturity, log_moneyness);
  out.steps = steps;
  out.seed = seed;
  return out;
}

}  // namespace rough
