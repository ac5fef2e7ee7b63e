#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "bdl/log_complex.hpp"
#include "bdl/potential.hpp"

namespace bdl {

/// Weight data attached to (phi, xi, lambda): Phi(x) = lambda (Re xi . x - phi(x)), its
/// maximizer x_dagger, the taper gamma(x) = a ln(1 + |x - x_dagger|^2).
struct WeightContext {
  ConvexPotential potential;
  double lambda = 0.0;
  CVector xi;
  double a = 0.0;
  Vector x_dagger;
  double Phi_max = 0.0;

  double Phi(const Vector& x) const;
  Vector grad_Phi(const Vector& x) const;
  double gamma(const Vector& x) const;
  Vector grad_gamma(const Vector& x) const;
  double Phi_tilde(const Vector& x) const { return Phi(x) - Phi_max; }
  double Phi_star(const Vector& x) const { return 2.0 * Phi_tilde(x) + gamma(x); }

  // d = 1 conveniences.
  double Phi(double x) const;
  double dPhi(double x) const;
  double gamma(double x) const;
  double dgamma(double x) const;
};

/// Default taper exponent a = d + 2.
double default_gamma_exponent(int dimension);

/// Throws InvalidArgument unless lambda > 0 and a > d/2. `a` defaults to d + 2.
WeightContext weight_context(const ConvexPotential& p, const CVector& xi, double lambda,
                             std::optional<double> a = std::nullopt);
WeightContext weight_context(const ConvexPotential& p, std::complex<double> xi, double lambda,
                             std::optional<double> a = std::nullopt);

struct QuadratureOptions {
  double rel_tolerance = 1e-10;
  int initial_panels = 8;
  int max_panels_1d = 2048;
  long max_nodes = 20'000'000;
  /// Nats below the largest node contribution that still count as a resolved sum.
  double cancellation_budget = 36.0;
  /// Shift the integration line through the complex saddle when the family allows it.
  bool contour_shift = true;
};

struct ScriptFSample {
  CVector xi;
  double lambda = 0.0;
  LogComplex logF;
  double quadrature_error_estimate = 0.0;  // |log F(2n) - log F(n)| of the final doubling
  long nodes_used = 0;
  /// Imaginary offset of the horizontal integration contour, per coordinate.
  Vector contour_offset;
};

/// log of F(xi, lambda) = int_{R^d} exp(2 lambda (xi . x - phi(x))) dx, d <= 3.
///
/// Throws ConvergenceError when panel doubling stalls and MagnitudeUnderflow when the sum
/// cancels beyond the budget.
ScriptFSample log_scriptF(const ConvexPotential& p, const CVector& xi, double lambda,
                          const QuadratureOptions& options = {});
ScriptFSample log_scriptF(const ConvexPotential& p, std::complex<double> xi, double lambda,
                          const QuadratureOptions& options = {});

/// F together with grad_xi log F.
struct ScriptFJet {
  ScriptFSample sample;
  CVector dlog;
};

ScriptFJet scriptF_jet(const ConvexPotential& p, const CVector& xi, double lambda,
                       const QuadratureOptions& options = {});
ScriptFJet scriptF_jet(const ConvexPotential& p, std::complex<double> xi, double lambda,
                       const QuadratureOptions& options = {});

/// Leading Laplace term 2 lambda u(xi) - (d/2) log lambda + (d/2) log pi - (1/2) log det Hess phi(tau).
double laplace_log_asymptotic(const ConvexPotential& p, const Vector& xi, double lambda);
double laplace_log_asymptotic(const ConvexPotential& p, double xi, double lambda);

/// r(xi, lambda) = log|F| / (2 lambda).
double normalized_log(const ConvexPotential& p, const CVector& xi, double lambda,
                      const QuadratureOptions& options = {});
double normalized_log(const ConvexPotential& p, std::complex<double> xi, double lambda,
                      const QuadratureOptions& options = {});

/// Axis-aligned rectangle [re_lo, re_hi] x [im_lo, im_hi] in C.
struct ComplexBox {
  double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
};

/// max over interior grid nodes of |5-point Laplacian of f| (already divided by h^2).
double harmonicity_defect(const std::function<double(std::complex<double>)>& f, const ComplexBox& box,
                          double h);

/// Same for f = log|F(., lambda)|, d = 1. First certifies winding number 0 on the box
/// boundary and throws InvalidArgument when a zero is enclosed.
double harmonicity_defect(const ConvexPotential& p, const ComplexBox& box, double lambda, double h,
                          const QuadratureOptions& options = {});

}  // namespace bdl
