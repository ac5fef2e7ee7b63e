#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "bdl/errors.hpp"
#include "bdl/potential.hpp"

namespace bdl {

/// tau(xi) = (grad phi)^{-1}(xi) together with u(xi) = xi . tau - phi(tau).
struct LegendrePoint {
  Vector xi;
  Vector tau;
  double u_value = 0.0;
  int newton_iterations = 0;
  double residual = 0.0;  // |grad phi(tau) - xi|
};

/// Newton did not reach the residual tolerance; usually xi lies outside the numerical
/// range of grad phi.
class TauConvergenceError : public ConvergenceError {
 public:
  TauConvergenceError(const std::string& what, Vector last_iterate, double residual)
      : ConvergenceError(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}
  const Vector& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }

 private:
  Vector last_iterate_;
  double residual_;
};

struct TauOptions {
  double search_half_width = 50.0;
  int max_iterations = 200;
  double tolerance_scale = 1e-10;  // residual <= scale * (1 + |xi|)
};

LegendrePoint tau(const ConvexPotential& p, const Vector& xi, const TauOptions& options = {});
LegendrePoint tau(const ConvexPotential& p, double xi, const TauOptions& options = {});

double u_limit(const ConvexPotential& p, const Vector& xi);
double u_limit(const ConvexPotential& p, double xi);

/// max over samples of |grad u(grad phi(x)) - x|, with grad u evaluated both as tau and by
/// central differences of u_limit; the larger defect wins.
double inverse_identity_defect(const ConvexPotential& p, std::span<const Vector> samples);
double inverse_identity_defect(const ConvexPotential& p, std::span<const double> samples);

/// Complex solution of phi'(z) = xi near tau(Re xi), d = 1. Empty when the potential has no
/// complex extension or Newton fails to converge.
std::optional<std::complex<double>> complex_saddle(const ConvexPotential& p, std::complex<double> xi);

}  // namespace bdl
