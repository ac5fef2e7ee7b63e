#include "bdl/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bdl {

LegendrePoint tau(const ConvexPotential& p, const Vector& xi, const TauOptions& options) {
  const int d = p.dimension();
  if (xi.size() != d) throw InvalidArgument("tau: xi dimension does not match potential");
  if (!xi.allFinite()) throw InvalidArgument("tau: xi must be finite");

  const double tol = options.tolerance_scale * (1.0 + xi.norm());
  const double bound = options.search_half_width;
  Vector x = Vector::Zero(d);
  Vector r = p.gradient(x) - xi;
  double res = r.norm();
  int it = 0;
  while (res > tol && it < options.max_iterations) {
    ++it;
    const Matrix h = p.hessian(x);
    Vector step = h.ldlt().solve(r);
    if (!step.allFinite()) break;
    double scale = 1.0;
    Vector trial;
    double trial_res = 0.0;
    for (int halvings = 0; halvings < 60; ++halvings) {
      trial = (x - scale * step).cwiseMax(-bound).cwiseMin(bound);
      trial_res = (p.gradient(trial) - xi).norm();
      if (std::isfinite(trial_res) && trial_res < res) break;
      scale *= 0.5;
    }
    if (!(std::isfinite(trial_res) && trial_res < res)) break;
    x = trial;
    r = p.gradient(x) - xi;
    res = r.norm();
  }
  if (!(res <= tol)) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "tau: Newton stalled after %d iterations, residual %.3e > %.3e", it,
                  res, tol);
    throw TauConvergenceError(buf, x, res);
  }
  LegendrePoint out;
  out.xi = xi;
  out.tau = x;
  out.u_value = xi.dot(x) - p.value(x);
  out.newton_iterations = it;
  out.residual = res;
  return out;
}

LegendrePoint tau(const ConvexPotential& p, double xi, const TauOptions& options) {
  return tau(p, Vector::Constant(1, xi), options);
}

double u_limit(const ConvexPotential& p, const Vector& xi) { return tau(p, xi).u_value; }
double u_limit(const ConvexPotential& p, double xi) { return tau(p, xi).u_value; }

double inverse_identity_defect(const ConvexPotential& p, std::span<const Vector> samples) {
  double worst = 0.0;
  for (const Vector& x : samples) {
    const Vector xi = p.gradient(x);
    worst = std::max(worst, (tau(p, xi).tau - x).norm());

    Vector fd(xi.size());
    for (Eigen::Index j = 0; j < xi.size(); ++j) {
      const double h = 1e-5 * (1.0 + std::abs(xi[j]));
      Vector up = xi, dn = xi;
      up[j] += h;
      dn[j] -= h;
      fd[j] = (u_limit(p, up) - u_limit(p, dn)) / (2.0 * h);
    }
    worst = std::max(worst, (fd - x).norm());
  }
  return worst;
}

double inverse_identity_defect(const ConvexPotential& p, std::span<const double> samples) {
  std::vector<Vector> v;
  v.reserve(samples.size());
  for (double s : samples) v.push_back(Vector::Constant(1, s));
  return inverse_identity_defect(p, std::span<const Vector>(v));
}

std::optional<std::complex<double>> complex_saddle(const ConvexPotential& p, std::complex<double> xi) {
  if (p.dimension() != 1 || !p.has_complex_extension()) return std::nullopt;
  std::complex<double> z;
  try {
    z = tau(p, xi.real()).tau[0];
  } catch (const TauConvergenceError&) {
    return std::nullopt;
  }
  const double tol = 1e-13 * (1.0 + std::abs(xi));
  std::complex<double> r = p.derivative(z) - xi;
  for (int it = 0; it < 100 && std::abs(r) > tol; ++it) {
    const std::complex<double> step = r / p.second_derivative(z);
    double scale = 1.0;
    std::complex<double> trial = z - step;
    std::complex<double> trial_r = p.derivative(trial) - xi;
    while (!(std::abs(trial_r) < std::abs(r)) && scale > 1e-6) {
      scale *= 0.5;
      trial = z - scale * step;
      trial_r = p.derivative(trial) - xi;
    }
    if (!(std::abs(trial_r) < std::abs(r))) break;
    z = trial;
    r = trial_r;
  }
  if (!(std::abs(r) <= 1e-10 * (1.0 + std::abs(xi)))) return std::nullopt;
  return z;
}

}  // namespace bdl
