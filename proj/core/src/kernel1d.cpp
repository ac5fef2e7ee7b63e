#include "bdl/kernel1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "bdl/errors.hpp"
#include "bdl/legendre.hpp"
#include "bdl/quadrature.hpp"
#include "bdl/zeroscan.hpp"

namespace bdl {

using cd = std::complex<double>;

namespace {

constexpr double kMaxNoiseFloor = 0.5;

cd log_scriptF_on_ray(const ConvexPotential& p, cd xi, double lambda, const QuadratureOptions& opt) {
  try {
    return log_scriptF(p, xi, lambda, opt).logF.log();
  } catch (const MagnitudeUnderflow& e) {
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "log_bergman: F(%.6g%+.6gi) vanishes at working precision on the integration line; "
                  "locate the zero with find_zeros",
                  xi.real(), xi.imag());
    throw MagnitudeUnderflow(buf, e.log_mag(), e.max_term_log_mag());
  }
}

struct Line {
  double center = 0.0;  // real part of the line midpoint
  double offset = 0.0;  // constant imaginary part
  double half = 0.0;    // integrate center +- half
  bool certified = false;
};

struct Integrand {
  const ConvexPotential& p;
  cd s;
  double lambda;
  const KernelOptions& opt;
  cd operator()(cd xi) const { return lambda * xi * s - log_scriptF_on_ray(p, xi, lambda, opt.scriptf); }
};

// Extends the half width until the line ends and, for a shifted line, the vertical sides back
// to the real axis sit below the center by the budget plus margin.
void fit_reach(const Integrand& g, double sigma, Line& line) {
  const double drop = g.opt.cancellation_budget + 4.0;
  const double re_center = g(cd(line.center, line.offset)).real();
  line.half = std::sqrt(2.0 * (g.opt.cancellation_budget + 6.0)) * sigma;
  constexpr int kSide = 8;
  for (int grow = 0; grow < 40; ++grow) {
    bool ok = true;
    for (double sgn : {-1.0, 1.0}) {
      const double a = line.center + sgn * line.half;
      const int rungs = line.offset == 0.0 ? 0 : kSide;
      for (int k = 0; k <= rungs && ok; ++k) {
        const double b = line.offset * (1.0 - double(k) / kSide);
        if (!(g(cd(a, b)).real() - re_center <= -drop)) ok = false;
      }
    }
    if (ok) return;
    line.half *= 1.5;
  }
  throw ConvergenceError("log_bergman: integrand does not decay along the xi line");
}

struct PassResult {
  LogComplex value;
  double floor = 0.0;
  long nodes = 0;
};

PassResult integrate_line(const Integrand& g, const Line& line, int panels, cd ref) {
  const quad::CompositeRule rule = quad::composite(-line.half, line.half, panels);
  LogSumAccumulator acc;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const cd xi(line.center + rule.nodes[i], line.offset);
    acc.add(g(xi) - ref + std::log(rule.weights[i]));
  }
  const auto r = acc.result();
  if (!r || r->log_mag() < acc.max_term_log_mag() - g.opt.cancellation_budget) {
    throw MagnitudeUnderflow("log_bergman: magnitude underflow beyond cancellation budget",
                             r ? r->log_mag() + ref.real() : -INFINITY, acc.max_term_log_mag() + ref.real());
  }
  PassResult out;
  out.value = LogComplex(r->log_mag() + ref.real(), r->phase() + ref.imag());
  out.floor = 64.0 * std::numeric_limits<double>::epsilon() * std::exp(acc.log_mass() - acc.log_mag());
  out.nodes = static_cast<long>(rule.nodes.size());
  return out;
}

}  // namespace

KernelSample log_bergman(const ConvexPotential& p, cd z, cd w, double lambda, const KernelOptions& opt) {
  if (p.dimension() != 1) throw InvalidArgument("log_bergman: one-dimensional potential required");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("log_bergman: lambda must be positive");
  if (!std::isfinite(std::abs(z)) || !std::isfinite(std::abs(w))) throw InvalidArgument("log_bergman: non-finite point");

  const cd s = z + std::conj(w);
  const Integrand g{p, s, lambda, opt};
  const double x_mid = 0.5 * s.real();
  // Second derivative of log F is about 2 lambda / phi''(tau).
  const double sigma = std::sqrt(p.second_derivative(x_mid) / (2.0 * lambda));

  Line line;
  line.center = p.derivative(x_mid);
  if (opt.contour_shift && s.imag() != 0.0 && p.has_complex_extension()) {
    const cd xi_star = p.derivative(0.5 * s);
    Line shifted{xi_star.real(), xi_star.imag(), 0.0, false};
    try {
      fit_reach(g, sigma, shifted);
      const ComplexBox strip{shifted.center - shifted.half, shifted.center + shifted.half,
                             std::min(0.0, shifted.offset), std::max(0.0, shifted.offset)};
      if (winding_number(scriptF_log_jet(p, lambda, opt.scriptf), strip) == 0) {
        shifted.certified = true;
        line = shifted;
      }
    } catch (const Error&) {
      // Certification failed; the real-axis route below stays in force.
    }
  }
  if (!line.certified) fit_reach(g, sigma, line);

  // At least 12 nodes per period of exp(i lambda xi Im s) on the real-axis route.
  const double freq = line.certified ? 0.0 : lambda * std::abs(s.imag());
  const auto rule_size = static_cast<long>(quad::default_rule().nodes.size());
  const double periods = 2.0 * line.half * freq / (2.0 * std::numbers::pi);
  int panels = std::max<int>(opt.initial_panels, static_cast<int>(std::ceil(12.0 * periods / rule_size)));
  if (static_cast<long>(panels) * rule_size > opt.max_nodes) {
    throw ConvergenceError("log_bergman: oscillation lambda |Im(z - w)| exceeds the node budget; "
                           "increase max_nodes or reduce lambda");
  }

  const cd ref = g(cd(line.center, line.offset));
  PassResult prev = integrate_line(g, line, panels, ref);
  long nodes = prev.nodes;
  double err = INFINITY;
  while (true) {
    panels *= 2;
    if (static_cast<long>(panels) * rule_size + nodes > opt.max_nodes) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "log_bergman: quadrature did not converge (last change %.3e after %ld nodes)",
                    err, nodes);
      throw ConvergenceError(buf);
    }
    const PassResult cur = integrate_line(g, line, panels, ref);
    nodes += cur.nodes;
    err = std::abs(cd(cur.value.log_mag() - prev.value.log_mag(),
                      normalize_phase(cur.value.phase() - prev.value.phase())));
    if (err <= std::max(opt.rel_tolerance, cur.floor)) {
      if (cur.floor > kMaxNoiseFloor) {
        throw MagnitudeUnderflow("log_bergman: kernel value is below the roundoff floor of the sum",
                                 cur.value.log_mag(), cur.value.log_mag());
      }
      KernelSample out;
      out.z = z;
      out.w = w;
      out.lambda = lambda;
      out.logB = LogComplex(cur.value.log_mag() + std::log(lambda / (2.0 * std::numbers::pi)), cur.value.phase());
      out.normalized_log_mag = out.logB.log_mag() - lambda * p.value(z.real()) - lambda * p.value(w.real());
      out.quadrature_nodes = cur.nodes;
      out.quadrature_error_estimate = err;
      out.contour_offset = line.offset;
      out.strip_certified = line.certified;
      return out;
    }
    prev = cur;
  }
}

double normalized_offdiag(const ConvexPotential& p, cd z, cd w, double lambda, const KernelOptions& options) {
  return log_bergman(p, z, w, lambda, options).normalized_log_mag;
}

std::string_view to_string(DecayModel m) {
  switch (m) {
    case DecayModel::exponential: return "exponential";
    case DecayModel::subexponential: return "subexponential";
    case DecayModel::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

DecayFit decay_fit(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 6) throw InvalidArgument("decay_fit: need at least 6 samples");
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [lam, y] : samples) {
    if (!(lam > 1.0) || !std::isfinite(lam) || !std::isfinite(y)) {
      throw InvalidArgument("decay_fit: samples need lambda > 1 and finite values");
    }
    lo = std::min(lo, lam);
    hi = std::max(hi, lam);
  }
  if (hi < 8.0 * lo) throw InvalidArgument("decay_fit: lambda span below a factor 8, design is ill-conditioned");

  const auto n = static_cast<Eigen::Index>(samples.size());
  Matrix xe(n, 3), xs(n, 2);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = samples[static_cast<std::size_t>(i)].first;
    xe.row(i) << -lam, std::log(lam), 1.0;
    xs.row(i) << -std::sqrt(lam * std::log(lam)), 1.0;
    y[i] = samples[static_cast<std::size_t>(i)].second;
  }
  const Eigen::ColPivHouseholderQR<Matrix> qe(xe), qs(xs);
  if (qe.rank() < 3 || qs.rank() < 2) throw InvalidArgument("decay_fit: rank-deficient design");
  const Vector be = qe.solve(y), bs = qs.solve(y);

  DecayFit fit;
  fit.samples = std::move(samples);
  fit.c = be[0];
  fit.beta = be[1];
  fit.k_exp = be[2];
  fit.A = bs[0];
  fit.k_sub = bs[1];
  fit.rss_exp = (xe * be - y).squaredNorm();
  fit.rss_sub = (xs * bs - y).squaredNorm();

  // Residuals at roundoff level are indistinguishable.
  const double noise = 1e-24 * (1.0 + y.squaredNorm());
  const double re = fit.rss_exp + noise, rs = fit.rss_sub + noise;
  if (2.0 * re < rs && fit.c > 0.0) {
    fit.preferred = DecayModel::exponential;
  } else if (2.0 * rs < re) {
    fit.preferred = DecayModel::subexponential;
  } else {
    fit.preferred = DecayModel::inconclusive;
  }
  return fit;
}

namespace {

// P f(z) for f = exp(lambda xi0 w) over the box [x_lo, x_hi] x [-Y, Y], via the real-xi
// representation of B; the w-integral factors into an x part and a y part per xi node.
// The y part is exact.
cd project_exponential(const ConvexPotential& p, double xi0, cd z, double lambda, double scale) {
  const ConvexityBounds& b = p.convexity_bounds();
  const double c_low = std::max(b.low, 1e-6);

  // Leading-order log magnitude of the xi integrand divided by lambda:
  // xi Re z - 2 u(xi) + 2 u((xi + xi0) / 2). The window keeps everything within
  // 40 scale^2 nats of its peak.
  const auto envelope = [&](double xi) {
    return xi * z.real() - 2.0 * u_limit(p, xi) + 2.0 * u_limit(p, 0.5 * (xi + xi0));
  };
  const double drop = 40.0 * scale * scale / lambda;
  const double centre = 0.5 * (xi0 + p.derivative(z.real()));
  double peak = envelope(centre);
  const auto walk = [&](double dir) {
    double xi = centre, step = 0.25 * std::sqrt(c_low / lambda);
    for (int it = 0; it < 200; ++it) {
      xi += dir * step;
      const double e = envelope(xi);
      peak = std::max(peak, e);
      if (peak - e > drop && dir * (xi - xi0) > 0.0) return xi;
      step *= 1.25;
    }
    throw ConvergenceError("reproducing_residual: xi integrand does not decay");
  };
  const double xi_hi = walk(1.0);
  const double xi_lo = walk(-1.0);

  const double l_x = scale * std::sqrt(40.0 / (lambda * c_low));
  const double x_lo = tau(p, 0.5 * (xi_lo + xi0)).tau[0] - l_x;
  const double x_hi = tau(p, 0.5 * (xi_hi + xi0)).tau[0] + l_x;
  // Box-only families declare a huge c_high; only the curvature over the x box matters.
  double c_high = c_low;
  for (int i = 0; i <= 128; ++i) c_high = std::max(c_high, p.second_derivative(x_lo + (x_hi - x_lo) * i / 128.0));
  c_high = std::min(c_high, std::max(b.high, c_low));
  const double y_half = scale * std::sqrt(120.0 * c_high / lambda);

  const auto rule_size = static_cast<double>(quad::default_rule().nodes.size());
  auto panels_for = [&](double length, double freq) {
    return 4 + static_cast<int>(std::ceil(12.0 * length * freq / (2.0 * std::numbers::pi) / rule_size));
  };
  const quad::CompositeRule xi_rule = quad::composite(xi_lo, xi_hi, 2 * panels_for(xi_hi - xi_lo, lambda * y_half));
  const quad::CompositeRule x_rule = quad::composite(x_lo, x_hi, 16);

  std::vector<double> two_phi(x_rule.nodes.size());
  for (std::size_t i = 0; i < x_rule.nodes.size(); ++i) two_phi[i] = 2.0 * lambda * p.value(x_rule.nodes[i]);

  cd total = 0.0;
  for (std::size_t k = 0; k < xi_rule.nodes.size(); ++k) {
    const double xi = xi_rule.nodes[k];
    double x_part = 0.0;
    for (std::size_t i = 0; i < x_rule.nodes.size(); ++i) {
      x_part += x_rule.weights[i] * std::exp(lambda * (xi + xi0) * x_rule.nodes[i] - two_phi[i]);
    }
    // int_{-Y}^{Y} cos(freq y) dy in closed form.
    const double freq = lambda * (xi0 - xi);
    const double y_part = std::abs(freq * y_half) < 1e-8 ? 2.0 * y_half : 2.0 * std::sin(freq * y_half) / freq;
    const cd log_f = log_scriptF(p, xi, lambda).logF.log();
    total += xi_rule.weights[k] * std::exp(lambda * xi * z - log_f) * x_part * y_part;
  }
  if (!std::isfinite(std::abs(total))) throw ConvergenceError("reproducing_residual: non-finite projection");
  return lambda / (2.0 * std::numbers::pi) * total;
}

}  // namespace

ReproducingResult reproducing_residual(const ConvexPotential& p, double xi0, cd z, double lambda, double box_scale) {
  if (p.dimension() != 1) throw InvalidArgument("reproducing_residual: one-dimensional potential required");
  if (!(box_scale > 0.0)) throw InvalidArgument("reproducing_residual: box scale must be positive");
  if (!(lambda > 0.0) || lambda > kReproducingMaxLambda) {
    throw InvalidArgument("reproducing_residual: lambda must lie in (0, 20]");
  }
  const cd f = std::exp(lambda * xi0 * z);
  const cd base = project_exponential(p, xi0, z, lambda, box_scale);
  const cd wide = project_exponential(p, xi0, z, lambda, 1.5 * box_scale);
  ReproducingResult r;
  r.residual = std::abs(base - f) / std::abs(f);
  r.truncation_estimate = std::abs(wide - base) / std::abs(f);
  r.truncation_dominated = r.truncation_estimate >= 0.5 * r.residual;
  return r;
}

}  // namespace bdl
