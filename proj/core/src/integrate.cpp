#include "rough/integrate.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace rough {
namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gk15(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) {
      gauss += kWg[j / 2] * pair;
    }
  }
  return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

IntegrationResult integrate_gk15(const std::function<double(double)>& f, double lo, double hi,
                                 double abs_tol, double rel_tol, int max_panels) {
  IntegrationResult out;
  if (lo == hi) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Panel> panels;
  panels.push(gk15(f, lo, hi));
  out.evaluations = 15;
  double value = panels.top().value;
  double error = panels.top().error;
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) &&
         static_cast<int>(panels.size()) < max_panels) {
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      panels.push(worst);
      break;
    }
    const Panel left = gk15(f, worst.lo, mid);
    const Panel right = gk15(f, mid, worst.hi);
    out.evaluations += 30;
    panels.push(left);
    panels.push(right);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
  }
  value = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  out.value = value;
  out.abs_error = error;
  out.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
  return out;
}

}  // namespace rough
