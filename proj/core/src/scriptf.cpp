#include "bdl/scriptf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "bdl/errors.hpp"
#include "bdl/legendre.hpp"
#include "bdl/quadrature.hpp"

namespace bdl {

double WeightContext::Phi(const Vector& x) const {
  return lambda * (xi.real().dot(x) - potential.value(x));
}

Vector WeightContext::grad_Phi(const Vector& x) const {
  return lambda * (xi.real() - potential.gradient(x));
}

double WeightContext::gamma(const Vector& x) const {
  return a * std::log1p((x - x_dagger).squaredNorm());
}

Vector WeightContext::grad_gamma(const Vector& x) const {
  const Vector dx = x - x_dagger;
  return (2.0 * a / (1.0 + dx.squaredNorm())) * dx;
}

double WeightContext::Phi(double x) const { return Phi(Vector(Vector::Constant(1, x))); }
double WeightContext::dPhi(double x) const { return grad_Phi(Vector(Vector::Constant(1, x)))[0]; }
double WeightContext::gamma(double x) const { return gamma(Vector(Vector::Constant(1, x))); }
double WeightContext::dgamma(double x) const { return grad_gamma(Vector(Vector::Constant(1, x)))[0]; }

double default_gamma_exponent(int dimension) { return dimension + 2.0; }

WeightContext weight_context(const ConvexPotential& p, const CVector& xi, double lambda,
                             std::optional<double> a) {
  const int d = p.dimension();
  if (xi.size() != d) throw InvalidArgument("weight_context: xi dimension mismatch");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("weight_context: lambda must be positive");
  const double exponent = a.value_or(default_gamma_exponent(d));
  if (!(exponent > d / 2.0)) {
    throw InvalidArgument("weight_context: gamma exponent a must exceed d/2");
  }
  const LegendrePoint lp = tau(p, Vector(xi.real()));
  WeightContext ctx{p, lambda, xi, exponent, lp.tau, 0.0};
  ctx.Phi_max = ctx.Phi(lp.tau);
  return ctx;
}

WeightContext weight_context(const ConvexPotential& p, std::complex<double> xi, double lambda,
                             std::optional<double> a) {
  return weight_context(p, CVector(CVector::Constant(1, xi)), lambda, a);
}

namespace {

using cd = std::complex<double>;

// Relative roundoff floor above which a sum is treated as pure noise.
constexpr double kMaxNoiseFloor = 0.5;
// Cancellation (nats) on the saddle line that triggers the offset scan.
constexpr double kFlatterThreshold = 8.0;

// Complex solution of grad phi(z) = xi, started from tau(Re xi).
std::optional<CVector> complex_saddle_nd(const ConvexPotential& p, const CVector& xi, const Vector& start) {
  CVector z = start.cast<cd>();
  CVector r = p.gradient(z) - xi;
  const double tol = 1e-13 * (1.0 + xi.norm());
  for (int it = 0; it < 100 && r.norm() > tol; ++it) {
    const CVector step = p.hessian(z).partialPivLu().solve(r);
    if (!step.allFinite()) return std::nullopt;
    double scale = 1.0;
    CVector trial = z - step;
    CVector trial_r = p.gradient(trial) - xi;
    while (!(trial_r.norm() < r.norm()) && scale > 1e-6) {
      scale *= 0.5;
      trial = z - scale * step;
      trial_r = p.gradient(trial) - xi;
    }
    if (!(trial_r.norm() < r.norm())) break;
    z = trial;
    r = trial_r;
  }
  if (!(r.norm() <= 1e-10 * (1.0 + xi.norm()))) return std::nullopt;
  return z;
}

struct Contour {
  Vector center;  // real part of the line through the saddle
  Vector offset;  // constant imaginary part
  Vector sigma;   // x = center + i offset + sigma s
  Vector reach;   // |s_j| <= reach_j
  bool complex_path = false;
};

cd exponent(const ConvexPotential& p, const CVector& xi, double lambda, const CVector& z, bool complex_path) {
  if (complex_path) return 2.0 * lambda * ((xi.transpose() * z)(0) - p.value(z));
  const Vector x = z.real();
  return 2.0 * lambda * ((xi.transpose() * x.cast<cd>())(0) - p.value(x));
}

void set_reach(const ConvexPotential& p, const CVector& xi, double lambda, const QuadratureOptions& opt,
               Contour& c) {
  const int d = p.dimension();
  const Matrix h = p.hessian(c.center);
  c.sigma.resize(d);
  for (int j = 0; j < d; ++j) {
    const double curv = std::max(h(j, j), 1e-300);
    c.sigma[j] = 1.0 / std::sqrt(2.0 * lambda * curv);
  }

  // Near the center the real part falls like -s^2/2; extend until it has dropped by the
  // cancellation budget plus margin at both ends of every axis.
  const double drop = opt.cancellation_budget + 4.0;
  const double r0 = std::sqrt(2.0 * (opt.cancellation_budget + 6.0));
  c.reach = Vector::Constant(d, r0);
  CVector base(d);
  for (int j = 0; j < d; ++j) base[j] = cd(c.center[j], c.offset[j]);
  const double re_center = exponent(p, xi, lambda, base, c.complex_path).real();
  for (int j = 0; j < d; ++j) {
    for (int grow = 0; grow < 40; ++grow) {
      bool ok = true;
      for (double sgn : {-1.0, 1.0}) {
        CVector z = base;
        z[j] += sgn * c.sigma[j] * c.reach[j];
        const double re = exponent(p, xi, lambda, z, c.complex_path).real();
        if (!(re - re_center <= -drop)) ok = false;
      }
      if (ok) break;
      c.reach[j] *= 1.5;
    }
  }
}

Contour build_contour(const ConvexPotential& p, const CVector& xi, double lambda, const QuadratureOptions& opt) {
  const int d = p.dimension();
  Contour c;
  const Vector tau_re = tau(p, Vector(xi.real())).tau;
  c.center = tau_re;
  c.offset = Vector::Zero(d);
  const bool real_xi = xi.imag().cwiseAbs().maxCoeff() == 0.0;
  if (opt.contour_shift && !real_xi && p.has_complex_extension()) {
    auto saddle = complex_saddle_nd(p, xi, tau_re);
    if (saddle) {
      // The horizontal line must be a descent direction through the saddle.
      const CMatrix hs = p.hessian(*saddle);
      for (int j = 0; j < d; ++j) {
        if (!(hs(j, j).real() > 0.25 * std::abs(hs(j, j)))) saddle.reset();
        if (!saddle) break;
      }
    }
    if (saddle) {
      const double limit = 0.9 * p.contour_strip_half_width();
      c.center = saddle->real();
      c.offset = saddle->imag().cwiseMax(-limit).cwiseMin(limit);
    }
  }
  c.complex_path = !real_xi;
  set_reach(p, xi, lambda, opt, c);
  return c;
}

// Fallback for d = 1 when the saddle line cancels heavily: scan horizontal offsets and keep
// the one whose largest integrand value is smallest. F does not depend on the offset; only
// the roundoff does.
constexpr int kPeakSamples = 241;

// Largest Re exponent on the contour line over three times its quadrature reach.
double line_peak(const ConvexPotential& p, const CVector& xi, double lambda, const Contour& c, double* where) {
  const double half = 3.0 * c.sigma[0] * c.reach[0];
  double best = -INFINITY;
  for (int k = 0; k < kPeakSamples; ++k) {
    const double t = c.center[0] - half + 2.0 * half * k / (kPeakSamples - 1);
    const double re = exponent(p, xi, lambda, CVector::Constant(1, cd(t, c.offset[0])), true).real();
    if (re > best) {
      best = re;
      if (where) *where = t;
    }
  }
  return best;
}

// Fallback for d = 1 when the saddle line is unusable: scan horizontal offsets and keep the
// one whose largest integrand value is smallest. F does not depend on the offset; only the
// roundoff does.
std::optional<Contour> flatter_contour(const ConvexPotential& p, const CVector& xi, double lambda,
                                       const QuadratureOptions& opt, const Contour& current) {
  const double limit = 0.9 * p.contour_strip_half_width();
  const double curv = std::max(p.second_derivative(tau(p, xi[0].real()).tau[0]), 1e-6);
  const double span = std::min(limit, 1.5 * std::max({std::abs(current.offset[0]), std::abs(xi[0].imag()) / curv, 0.1}));
  constexpr int kOffsets = 97;

  Contour probe = current;
  double where = current.center[0];
  const double base = line_peak(p, xi, lambda, current, &where);
  double best = base, best_y = current.offset[0], best_t = where;
  for (int k = 0; k < kOffsets; ++k) {
    probe.offset[0] = -span + 2.0 * span * k / (kOffsets - 1);
    const double m = line_peak(p, xi, lambda, probe, &where);
    if (m < best) {
      best = m;
      best_y = probe.offset[0];
      best_t = where;
    }
  }
  if (!(best < base - 1.0)) return std::nullopt;
  Contour c = current;
  c.center[0] = best_t;
  c.offset[0] = best_y;
  set_reach(p, xi, lambda, opt, c);
  return c;
}

struct Pass {
  LogSumAccumulator f;
  std::vector<LogSumAccumulator> df;
  cd ref;
  long nodes = 0;
};

Pass integrate(const ConvexPotential& p, const CVector& xi, double lambda, const Contour& c, int panels,
               bool with_jet) {
  const int d = p.dimension();
  std::vector<quad::CompositeRule> axes;
  for (int j = 0; j < d; ++j) axes.push_back(quad::composite(-c.reach[j], c.reach[j], panels));
  const long per_axis = static_cast<long>(axes[0].nodes.size());
  long total = 1;
  for (int j = 0; j < d; ++j) total *= per_axis;

  CVector base(d);
  for (int j = 0; j < d; ++j) base[j] = cd(c.center[j], c.offset[j]);
  Pass pass;
  pass.ref = exponent(p, xi, lambda, base, c.complex_path);
  if (with_jet) pass.df.resize(d);
  pass.nodes = total;

  CVector z(d);
  for (long k = 0; k < total; ++k) {
    long rem = k;
    double log_w = 0.0;
    for (int j = 0; j < d; ++j) {
      const long i = rem % per_axis;
      rem /= per_axis;
      z[j] = base[j] + c.sigma[j] * axes[j].nodes[i];
      log_w += std::log(axes[j].weights[i]);
    }
    const cd e = exponent(p, xi, lambda, z, c.complex_path) - pass.ref + log_w;
    pass.f.add(e);
    if (with_jet) {
      for (int j = 0; j < d; ++j) pass.df[j].add(e, 2.0 * lambda * z[j]);
    }
  }
  return pass;
}

double log_distance(const LogComplex& a, const LogComplex& b) {
  return std::abs(cd(a.log_mag() - b.log_mag(), normalize_phase(a.phase() - b.phase())));
}

LogComplex finish(const Pass& pass, const Contour& c, const QuadratureOptions& opt) {
  const auto r = pass.f.result();
  const double log_sigma = c.sigma.array().log().sum();
  if (!r || r->log_mag() < pass.f.max_term_log_mag() - opt.cancellation_budget) {
    const double lm = r ? r->log_mag() : -INFINITY;
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "log_scriptF: magnitude underflow beyond cancellation budget "
                  "(log|sum| %.6g vs largest term %.6g, budget %.3g)",
                  lm, pass.f.max_term_log_mag(), opt.cancellation_budget);
    throw MagnitudeUnderflow(buf, lm + pass.ref.real() + log_sigma,
                             pass.f.max_term_log_mag() + pass.ref.real() + log_sigma);
  }
  return LogComplex(r->log_mag() + pass.ref.real() + log_sigma, r->phase() + pass.ref.imag());
}

MagnitudeUnderflow noise_underflow(double floor, const LogComplex& value, const Pass& pass) {
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "log_scriptF: magnitude underflow beyond cancellation budget (roundoff floor %.3g of the value)",
                floor);
  return MagnitudeUnderflow(buf, value.log_mag(), pass.f.max_term_log_mag() + pass.ref.real());
}

ScriptFJet compute(const ConvexPotential& p, const CVector& xi, double lambda, const QuadratureOptions& opt,
                   bool with_jet) {
  const int d = p.dimension();
  if (d > 3) throw InvalidArgument("log_scriptF: dimension above 3 is not supported");
  if (xi.size() != d) throw InvalidArgument("log_scriptF: xi dimension mismatch");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("log_scriptF: lambda must be positive");
  if (!xi.allFinite()) throw InvalidArgument("log_scriptF: xi must be finite");

  Contour c = build_contour(p, xi, lambda, opt);
  int panels = d == 1 ? opt.initial_panels : std::max(2, opt.initial_panels / 4);
  const int max_panels = d == 1 ? opt.max_panels_1d : opt.max_panels_1d >> (3 * (d - 1));
  const auto rule_size = static_cast<long>(quad::default_rule().nodes.size());

  Pass prev = integrate(p, xi, lambda, c, panels, false);
  long nodes = prev.nodes;
  if (opt.contour_shift && c.complex_path && d == 1 && p.has_complex_extension()) {
    const bool cancels = prev.f.log_mass() - prev.f.log_mag() > kFlatterThreshold;
    const bool off_peak = line_peak(p, xi, lambda, c, nullptr) > prev.ref.real() + 2.0;
    if (cancels || off_peak) {
      if (auto alt = flatter_contour(p, xi, lambda, opt, c)) {
        c = *alt;
        prev = integrate(p, xi, lambda, c, panels, false);
        nodes += prev.nodes;
      }
    }
  }
  LogComplex prev_val = finish(prev, c, opt);
  double err = INFINITY;
  double last_floor = 0.0;
  while (true) {
    panels *= 2;
    long next_nodes = 1;
    for (int j = 0; j < d; ++j) next_nodes *= rule_size * panels;
    if (panels > std::max(max_panels, 2) || nodes + next_nodes > opt.max_nodes) {
      if (last_floor > kMaxNoiseFloor) throw noise_underflow(last_floor, prev_val, prev);
      char buf[240];
      std::snprintf(buf, sizeof buf,
                    "log_scriptF: quadrature did not converge (last change %.3e > %.1e after %ld nodes)",
                    err, opt.rel_tolerance, nodes);
      throw ConvergenceError(buf);
    }
    Pass cur = integrate(p, xi, lambda, c, panels, with_jet);
    nodes += cur.nodes;
    const LogComplex cur_val = finish(cur, c, opt);
    err = log_distance(cur_val, prev_val);
    // Roundoff floor of the sum relative to its value.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                         std::exp(cur.f.log_mass() - cur.f.log_mag());
    last_floor = floor;
    if (err <= std::max(opt.rel_tolerance, floor)) {
      if (floor > kMaxNoiseFloor) throw noise_underflow(floor, cur_val, cur);
      ScriptFJet out;
      out.sample = {xi, lambda, cur_val, err, nodes, c.offset};
      if (with_jet) {
        out.dlog = CVector::Zero(d);
        for (int j = 0; j < d; ++j) {
          if (cur.df[j].empty()) continue;
          out.dlog[j] = cur.df[j].scaled_sum() / cur.f.scaled_sum() *
                        std::exp(cur.df[j].scale() - cur.f.scale());
        }
      }
      return out;
    }
    prev_val = cur_val;
    prev = std::move(cur);
  }
}

}  // namespace

ScriptFSample log_scriptF(const ConvexPotential& p, const CVector& xi, double lambda,
                          const QuadratureOptions& options) {
  return compute(p, xi, lambda, options, false).sample;
}

ScriptFSample log_scriptF(const ConvexPotential& p, std::complex<double> xi, double lambda,
                          const QuadratureOptions& options) {
  return log_scriptF(p, CVector(CVector::Constant(1, xi)), lambda, options);
}

ScriptFJet scriptF_jet(const ConvexPotential& p, const CVector& xi, double lambda,
                       const QuadratureOptions& options) {
  return compute(p, xi, lambda, options, true);
}

ScriptFJet scriptF_jet(const ConvexPotential& p, std::complex<double> xi, double lambda,
                       const QuadratureOptions& options) {
  return scriptF_jet(p, CVector(CVector::Constant(1, xi)), lambda, options);
}

double laplace_log_asymptotic(const ConvexPotential& p, const Vector& xi, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("laplace_log_asymptotic: lambda must be positive");
  const LegendrePoint lp = tau(p, xi);
  const double d = p.dimension();
  const Matrix h = p.hessian(lp.tau);
  const double log_det = h.ldlt().vectorD().array().log().sum();
  return 2.0 * lambda * lp.u_value - 0.5 * d * std::log(lambda) + 0.5 * d * std::log(std::numbers::pi) -
         0.5 * log_det;
}

double laplace_log_asymptotic(const ConvexPotential& p, double xi, double lambda) {
  return laplace_log_asymptotic(p, Vector(Vector::Constant(1, xi)), lambda);
}

double normalized_log(const ConvexPotential& p, const CVector& xi, double lambda,
                      const QuadratureOptions& options) {
  return log_scriptF(p, xi, lambda, options).logF.log_mag() / (2.0 * lambda);
}

double normalized_log(const ConvexPotential& p, std::complex<double> xi, double lambda,
                      const QuadratureOptions& options) {
  return normalized_log(p, CVector(CVector::Constant(1, xi)), lambda, options);
}

}  // namespace bdl
