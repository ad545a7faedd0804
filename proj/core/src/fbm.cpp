#include "rough/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>

#include "rough/error_metrics.hpp"
#include "rough/integrate.hpp"
#include "rough/parallel.hpp"
#include "rough/rng.hpp"
#include "rough/specfun.hpp"

namespace rough {
namespace {

constexpr std::size_t kBlock = 256;

void check_grid(double horizon, int steps, int paths) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::domain_error("simulation horizon must be positive");
  }
  if (steps < 1 || paths < 1) {
    throw std::domain_error("steps and paths must be at least 1");
  }
}

std::size_t block_count(int paths) {
  return (static_cast<std::size_t>(paths) + kBlock - 1) / kBlock;
}

}  // namespace

CholeskyResult jittered_cholesky(const Eigen::MatrixXd& cov) {
  const Eigen::Index n = cov.rows();
  if (n != cov.cols() || n == 0) {
    throw std::invalid_argument("jittered_cholesky: need a nonempty square matrix");
  }
  Eigen::VectorXd scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = cov(i, i);
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw NonPsdError("jittered_cholesky: negative or non-finite variance");
    }
    scale(i) = d > 0.0 ? std::sqrt(d) : 1.0;
  }
  Eigen::MatrixXd corr = scale.cwiseInverse().asDiagonal() * cov * scale.cwiseInverse().asDiagonal();
  corr = 0.5 * (corr + corr.transpose()).eval();

  const double trace = corr.trace();
  const double max_jitter = 1e-14 * trace;
  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd shifted = corr;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      CholeskyResult out;
      out.factor = scale.asDiagonal() * Eigen::MatrixXd(llt.matrixL());
      out.jitter = jitter;
      return out;
    }
    if (jitter >= max_jitter) {
      break;
    }
    jitter = jitter == 0.0 ? 1e-16 * trace : std::min(10.0 * jitter, max_jitter);
  }
  throw NonPsdError("jittered_cholesky: matrix is not positive semidefinite (duplicate nodes?)");
}

double decay_integral(double x, double dt) {
  if (x == 0.0) {
    return dt;
  }
  return -std::expm1(-x * dt) / x;
}

StepCovariance step_covariance(const std::vector<double>& nodes, double dt) {
  if (!(dt > 0.0)) {
    throw std::domain_error("step_covariance: step must be positive");
  }
  for (double x : nodes) {
    if (!(x >= 0.0)) {
      throw std::domain_error("step_covariance: nodes must be nonnegative");
    }
  }
  const auto k = static_cast<Eigen::Index>(nodes.size());
  StepCovariance out;
  out.nodes = nodes;
  out.dt = dt;
  out.matrix.resize(k + 1, k + 1);
  out.matrix(0, 0) = dt;
  for (Eigen::Index i = 0; i < k; ++i) {
    out.matrix(0, i + 1) = out.matrix(i + 1, 0) = decay_integral(nodes[i], dt);
    for (Eigen::Index j = 0; j <= i; ++j) {
      out.matrix(i + 1, j + 1) = out.matrix(j + 1, i + 1) = decay_integral(nodes[i] + nodes[j], dt);
    }
  }
  CholeskyResult chol = jittered_cholesky(out.matrix);
  out.cholesky = std::move(chol.factor);
  out.jitter = chol.jitter;
  return out;
}

double squared_kernel_integral(const ExpKernelApprox& approx, double t) {
  if (!(t >= 0.0)) {
    throw std::domain_error("squared_kernel_integral: t must be nonnegative");
  }
  double sum = 0.0;
  const std::size_t k = approx.size();
  for (std::size_t i = 0; i < k; ++i) {
    sum += approx.weights[i] * approx.weights[i] * decay_integral(2.0 * approx.nodes[i], t);
    for (std::size_t j = 0; j < i; ++j) {
      sum += 2.0 * approx.weights[i] * approx.weights[j] *
             decay_integral(approx.nodes[i] + approx.nodes[j], t);
    }
  }
  return sum;
}

FbmPaths simulate_fbm_paths(const ExpKernelApprox& approx, double horizon, int steps, int paths,
                            std::uint64_t seed, unsigned threads) {
  check_grid(horizon, steps, paths);
  const double dt = horizon / steps;
  const StepCovariance cov = step_covariance(approx.nodes, dt);
  const auto k = static_cast<Eigen::Index>(approx.size());
  Eigen::VectorXd decay(k);
  Eigen::VectorXd weights(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    decay(i) = std::exp(-approx.nodes[i] * dt);
    weights(i) = approx.weights[i];
  }

  FbmPaths out;
  out.paths = paths;
  out.times.resize(steps + 1);
  for (int j = 0; j <= steps; ++j) {
    out.times[j] = horizon * j / steps;
  }
  const std::size_t width = out.times.size();
  out.values.assign(static_cast<std::size_t>(paths) * width, 0.0);

  parallel_for(block_count(paths), threads, [&](std::size_t block) {
    const std::size_t end = std::min<std::size_t>((block + 1) * kBlock, paths);
    Eigen::VectorXd z(k + 1);
    Eigen::VectorXd y(k);
    for (std::size_t p = block * kBlock; p < end; ++p) {
      auto engine = path_engine(seed, p, 0);
      std::normal_distribution<double> normal;
      y.setZero();
      double* row = out.values.data() + p * width;
      for (int j = 0; j < steps; ++j) {
        for (Eigen::Index i = 0; i <= k; ++i) {
          z(i) = normal(engine);
        }
        const Eigen::VectorXd innov = cov.cholesky.triangularView<Eigen::Lower>() * z;
        y = decay.cwiseProduct(y) + innov.tail(k);
        row[j + 1] = weights.dot(y);
      }
    }
  });
  return out;
}

void write_paths_csv(std::ostream& out, const FbmPaths& paths) {
  out << "path,t,xhat\n";
  char buf[96];
  for (int p = 0; p < paths.paths; ++p) {
    for (std::size_t j = 0; j < paths.times.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", p, paths.times[j],
                    paths.at(p, static_cast<int>(j)));
      out << buf;
    }
  }
}

double rl_fbm_covariance(double hurst, double t, double s) {
  if (!(hurst > 0.0 && hurst < 1.0)) {
    throw std::domain_error("rl_fbm_covariance: H must lie in (0, 1)");
  }
  if (t < s) {
    std::swap(t, s);
  }
  if (!(s > 0.0)) {
    return 0.0;
  }
  const double g = gamma_fn(hurst + 0.5);
  if (t == s) {
    return std::pow(t, 2.0 * hurst) / (2.0 * hurst * g * g);
  }
  // ∫_0^s (t-s+v)^(H-1/2) v^(H-1/2) dv with v = w^(1/p), which absorbs the
  // endpoint singularity.
  const double p = hurst + 0.5;
  const double d = t - s;
  auto f = [&](double w) { return std::pow(d + std::pow(w, 1.0 / p), hurst - 0.5); };
  const IntegrationResult r = integrate_gk15(f, 0.0, std::pow(s, p), 1e-15, 1e-12, 4000);
  return r.value / (p * g * g);
}

double rl_fbm_increment_covariance(double hurst, double t, double a, double b) {
  if (!(a <= b)) {
    throw std::domain_error("rl_fbm_increment_covariance: need a <= b");
  }
  if (!(a < t)) {
    return 0.0;
  }
  const double p = hurst + 0.5;
  const double hi = std::min(b, t);
  return (std::pow(t - a, p) - std::pow(t - hi, p)) / gamma_fn(p + 1.0);
}

CoupledErrorResult simulate_coupled_error(const ExpKernelApprox& approx, double horizon,
                                          int steps, int paths, std::uint64_t seed,
                                          unsigned threads) {
  check_grid(horizon, steps, paths);
  const double hurst = approx.hurst;
  if (!(hurst > 0.0 && hurst < 0.5)) {
    throw std::domain_error("simulate_coupled_error: needs a fractional-kernel rule");
  }
  const double dt = horizon / steps;
  const double p = hurst + 0.5;
  const double gp = gamma_fn(p);
  const double gp1 = gamma_fn(p + 1.0);
  const auto k = static_cast<Eigen::Index>(approx.size());
  const StepCovariance base = step_covariance(approx.nodes, dt);

  std::vector<Eigen::MatrixXd> factors(steps);
  for (int j = 0; j < steps; ++j) {
    const double lag_hi = horizon - j * dt;
    const double lag_lo = j + 1 == steps ? 0.0 : horizon - (j + 1) * dt;
    Eigen::MatrixXd cov(k + 2, k + 2);
    cov.topLeftCorner(k + 1, k + 1) = base.matrix;
    const double cov_dw = (std::pow(lag_hi, p) - std::pow(lag_lo, p)) / gp1;
    cov(k + 1, k + 1) =
        (std::pow(lag_hi, 2.0 * hurst) - std::pow(lag_lo, 2.0 * hurst)) / (2.0 * hurst * gp * gp);
    cov(0, k + 1) = cov(k + 1, 0) = cov_dw;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double x = approx.nodes[i];
      double c;
      if (x == 0.0) {
        c = cov_dw;
      } else if (lag_lo == 0.0) {
        c = std::pow(x, -p) * lower_incomplete_gamma(p, x * dt) / gp;
      } else {
        // ∫_0^Δ G(lag_lo + u) e^{-xu} du with v = xu; e^{-60} is negligible.
        auto f = [&](double v) { return std::pow(lag_lo + v / x, hurst - 0.5) * std::exp(-v); };
        c = integrate_gk15(f, 0.0, std::min(x * dt, 60.0), 1e-16, 1e-12).value / (x * gp);
      }
      cov(i + 1, k + 1) = cov(k + 1, i + 1) = c;
    }
    factors[j] = jittered_cholesky(cov).factor;
  }

  Eigen::VectorXd decay(k);
  Eigen::VectorXd weights(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    decay(i) = std::exp(-approx.nodes[i] * dt);
    weights(i) = approx.weights[i];
  }

  std::vector<double> sq(paths);
  parallel_for(block_count(paths), threads, [&](std::size_t block) {
    const std::size_t end = std::min<std::size_t>((block + 1) * kBlock, paths);
    Eigen::VectorXd z(k + 2);
    Eigen::VectorXd y(k);
    for (std::size_t path = block * kBlock; path < end; ++path) {
      auto engine = path_engine(seed, path, 0);
      std::normal_distribution<double> normal;
      y.setZero();
      double exact = 0.0;
      for (int j = 0; j < steps; ++j) {
        for (Eigen::Index i = 0; i < k + 2; ++i) {
          z(i) = normal(engine);
        }
        const Eigen::VectorXd v = factors[j].triangularView<Eigen::Lower>() * z;
        y = decay.cwiseProduct(y) + v.segment(1, k);
        exact += v(k + 1);
      }
      const double diff = exact - weights.dot(y);
      sq[path] = diff * diff;
    }
  });

  double sum = 0.0;
  double sum2 = 0.0;
  for (double v : sq) {
    sum += v;
    sum2 += v * v;
  }
  CoupledErrorResult out;
  out.paths = paths;
  out.mean_square = sum / paths;
  const double var = paths > 1 ? (sum2 - paths * out.mean_square * out.mean_square) / (paths - 1) : 0.0;
  out.std_error = std::sqrt(std::max(var, 0.0) / paths);
  out.exact = l2_error_exact(approx, hurst, horizon).l2_error_sq;
  return out;
}

}  // namespace rough
