#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "bdl/errors.hpp"
#include "bdl/log_complex.hpp"
#include "bdl/potential.hpp"
#include "bdl/scriptf.hpp"

namespace bdl {

/// log f(z) and f'(z)/f(z). Evaluators signal |f| indistinguishable from zero by throwing
/// MagnitudeUnderflow.
struct LogJet {
  LogComplex value;
  std::complex<double> dlog;
};

using LogJetFn = std::function<LogJet(std::complex<double>)>;

/// Wraps an ordinary holomorphic function and its derivative.
LogJetFn log_jet_of(std::function<std::complex<double>(std::complex<double>)> f,
                    std::function<std::complex<double>(std::complex<double>)> df);

/// z -> F(z, lambda) for a one-dimensional potential.
LogJetFn scriptF_log_jet(const ConvexPotential& p, double lambda, const QuadratureOptions& options = {});

/// z -> f(z) (z - root), used to plant a known zero.
LogJetFn with_injected_root(LogJetFn f, std::complex<double> root);

/// A zero of f may sit on or next to the rectangle boundary.
class BoundaryZeroError : public Error {
 public:
  BoundaryZeroError(const std::string& what, std::complex<double> where) : Error(what), where_(where) {}
  std::complex<double> where() const { return where_; }

 private:
  std::complex<double> where_;
};

struct WindingOptions {
  int samples_per_side = 32;
  int max_samples_per_side = 1 << 16;
};

/// Argument principle on the counterclockwise boundary of `rect`. Adjacent samples are
/// refined until their phase difference stays below pi/2 and matches the change predicted
/// from f'/f. Throws BoundaryZeroError when the
/// boundary magnitude underflows or refinement runs out of samples.
int winding_number(const LogJetFn& f, const ComplexBox& rect, const WindingOptions& options = {});

struct ZeroRoot {
  std::complex<double> xi;
  double residual_log_mag = 0.0;  // log|f(xi)|; -inf when it underflowed
  int newton_steps = 0;
  /// 1 for a refined simple root; > 1 for an unresolved cluster at the depth cap.
  int multiplicity = 1;
};

struct ZeroCertificate {
  ComplexBox rectangle;
  int winding = 0;
  std::vector<ZeroRoot> roots;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double boundary_median_log_mag = 0.0;
  /// False when some sub-rectangle could not be resolved after the jittered retries.
  bool complete = true;
  std::vector<ComplexBox> unresolved;
};

struct ZeroScanOptions {
  WindingOptions winding;
  int max_depth = 20;
  int max_retries = 5;
  int max_newton_steps = 60;
  double newton_tolerance = 1e-12;
};

ZeroCertificate find_zeros(const LogJetFn& f, const ComplexBox& rect, const ZeroScanOptions& options = {});
ZeroCertificate find_zeros(const ConvexPotential& p, double lambda, const ComplexBox& rect,
                           const ZeroScanOptions& options = {}, const QuadratureOptions& quadrature = {});

struct DeficiencyTrendEntry {
  double lambda = 0.0;
  double min_deficiency = 0.0;
  std::complex<double> argmin_xi;
};

/// D(xi, lambda) = log|F(xi, lambda)| / (2 lambda) - u(Re xi) minimized over a grid x grid
/// lattice of the region (edges included). Top-level fields describe the last lambda.
struct DeficiencyReport {
  double lambda = 0.0;
  ComplexBox region;
  double min_deficiency = 0.0;
  std::complex<double> argmin_xi;
  double im_at_argmin = 0.0;
  std::vector<DeficiencyTrendEntry> trend;
};

/// Underflowing points count as deficiency -inf.
DeficiencyReport resonance_deficiency(const ConvexPotential& p, const std::vector<double>& lambdas,
                                      const ComplexBox& region, int grid,
                                      const QuadratureOptions& quadrature = {});

}  // namespace bdl
