#pragma once

#include <complex>
#include <string_view>
#include <utility>
#include <vector>

#include "bdl/log_complex.hpp"
#include "bdl/potential.hpp"
#include "bdl/scriptf.hpp"

namespace bdl {

struct KernelSample {
  std::complex<double> z, w;
  double lambda = 0.0;
  LogComplex logB;
  double normalized_log_mag = 0.0;  // logB.log_mag - lambda phi(Re z) - lambda phi(Re w)
  long quadrature_nodes = 0;        // xi nodes of the accepted pass
  double quadrature_error_estimate = 0.0;
  /// Imaginary part of the xi integration line; 0 on the real-axis route.
  double contour_offset = 0.0;
  /// True when F was certified zero-free between the real axis and the shifted line.
  bool strip_certified = false;
};

struct KernelOptions {
  double rel_tolerance = 1e-10;
  int initial_panels = 8;
  long max_nodes = 2'000'000;
  double cancellation_budget = 36.0;
  /// Move the xi line to Im xi*, xi* = phi'((z + conj w)/2), after a zero-free check.
  bool contour_shift = true;
  QuadratureOptions scriptf;
};

/// B(z, w) = (lambda / 2 pi) int exp(lambda xi (z + conj w)) / F(xi, lambda) dxi, d = 1.
KernelSample log_bergman(const ConvexPotential& p, std::complex<double> z, std::complex<double> w, double lambda,
                         const KernelOptions& options = {});

double normalized_offdiag(const ConvexPotential& p, std::complex<double> z, std::complex<double> w, double lambda,
                          const KernelOptions& options = {});

enum class DecayModel { exponential, subexponential, inconclusive };
std::string_view to_string(DecayModel m);

/// Least-squares fits of y(lambda) to -c lambda + beta log lambda + k and to
/// -A sqrt(lambda log lambda) + k.
struct DecayFit {
  std::vector<std::pair<double, double>> samples;
  double c = 0.0, beta = 0.0, k_exp = 0.0;
  double A = 0.0, k_sub = 0.0;
  double rss_exp = 0.0, rss_sub = 0.0;
  DecayModel preferred = DecayModel::inconclusive;
};

/// Needs at least 6 samples with lambda > 1 spanning a factor 8. The model with the rss
/// smaller by a factor 2 wins; exponential additionally needs c > 0.
DecayFit decay_fit(std::vector<std::pair<double, double>> samples);

struct ReproducingResult {
  double residual = 0.0;             // |P f(z) - f(z)| / |f(z)| for f = exp(lambda xi0 w)
  double truncation_estimate = 0.0;  // change of P f(z) when every box grows by 1.5
  bool truncation_dominated = false;
};

/// The w-quadrature is two-dimensional and its node count grows like lambda.
inline constexpr double kReproducingMaxLambda = 20.0;

/// Reproducing check on a truncated w-box whose extents are box_scale times Gaussian tail
/// widths; box_scale <= 0 and lambda outside (0, 20] are rejected.
ReproducingResult reproducing_residual(const ConvexPotential& p, double xi0, std::complex<double> z, double lambda,
                                       double box_scale = 1.0);

}  // namespace bdl
