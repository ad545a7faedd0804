#include "rough/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rough {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0) {
    throw std::invalid_argument("nelder_mead: empty starting point");
  }
  NelderMeadResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(dim + 1, start);
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i < dim; ++i) {
    simplex[i + 1][i] += options.initial_step;
  }
  for (std::size_t i = 0; i <= dim; ++i) {
    values[i] = eval(simplex[i]);
  }

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim);
  std::vector<double> trial(dim);
  auto along = [&](double t, std::vector<double>& out) {
    const auto& worst = simplex[order[dim]];
    for (std::size_t k = 0; k < dim; ++k) {
      out[k] = centroid[k] + t * (worst[k] - centroid[k]);
    }
  };

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const auto& best = simplex[order[0]];
    double diameter = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      double dist = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        dist = std::max(dist, std::abs(simplex[order[i]][k] - best[k]));
      }
      diameter = std::max(diameter, dist);
    }
    if (diameter < options.tolerance && std::isfinite(values[order[0]])) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evaluations) {
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        centroid[k] += simplex[order[i]][k] / static_cast<double>(dim);
      }
    }
    const std::size_t worst = order[dim];
    const double f_best = values[order[0]];
    const double f_second = values[order[dim - 1]];

    std::vector<double> reflected(dim);
    along(-1.0, reflected);
    const double f_reflected = eval(reflected);
    if (f_reflected < f_best) {
      along(-2.0, trial);
      const double f_expanded = eval(trial);
      if (f_expanded < f_reflected) {
        simplex[worst] = trial;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < f_second) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    along(outside ? -0.5 : 0.5, trial);
    const double f_contracted = eval(trial);
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      simplex[worst] = trial;
      values[worst] = f_contracted;
      continue;
    }
    // Shrink towards the best vertex.
    for (std::size_t i = 1; i <= dim; ++i) {
      auto& vertex = simplex[order[i]];
      for (std::size_t k = 0; k < dim; ++k) {
        vertex[k] = best[k] + 0.5 * (vertex[k] - best[k]);
      }
      values[order[i]] = eval(vertex);
    }
  }
  result.x = simplex[order[0]];
  result.value = values[order[0]];
  return result;
}

}  // namespace rough
