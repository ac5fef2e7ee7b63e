#include "bdl/zeroscan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "bdl/legendre.hpp"

namespace bdl {

using cd = std::complex<double>;

LogJetFn log_jet_of(std::function<cd(cd)> f, std::function<cd(cd)> df) {
  return [f = std::move(f), df = std::move(df)](cd z) {
    const cd v = f(z);
    if (!(std::abs(v) > 0.0) || !std::isfinite(std::abs(v))) {
      throw MagnitudeUnderflow("log_jet_of: function vanished", -INFINITY, 0.0);
    }
    return LogJet{LogComplex::from_complex(v), df(z) / v};
  };
}

LogJetFn scriptF_log_jet(const ConvexPotential& p, double lambda, const QuadratureOptions& options) {
  if (p.dimension() != 1) throw InvalidArgument("scriptF_log_jet: one-dimensional potential required");
  return [p, lambda, options](cd z) {
    const ScriptFJet jet = scriptF_jet(p, z, lambda, options);
    return LogJet{jet.sample.logF, jet.dlog[0]};
  };
}

LogJetFn with_injected_root(LogJetFn f, cd root) {
  return [f = std::move(f), root](cd z) {
    const cd d = z - root;
    if (d == 0.0) throw MagnitudeUnderflow("with_injected_root: evaluated at the planted zero", -INFINITY, 0.0);
    const LogJet j = f(z);
    return LogJet{j.value * LogComplex::from_complex(d), j.dlog + 1.0 / d};
  };
}

namespace {

LogJet eval_on_boundary(const LogJetFn& f, cd z) {
  try {
    return f(z);
  } catch (const MagnitudeUnderflow&) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "winding_number: |f| underflows at %.6g%+.6gi on the boundary; perturb the rectangle",
                  z.real(), z.imag());
    throw BoundaryZeroError(buf, z);
  }
}

struct BoundaryScan {
  int winding = 0;
  std::vector<double> log_mags;
};

// Phase change along one boundary segment. A step is accepted when the trapezoidal
// prediction from f'/f is below pi/2 and agrees with the observed wrapped change, which
// rules out aliasing by whole turns.
class SideWalker {
 public:
  SideWalker(const LogJetFn& f, int max_level, BoundaryScan& out) : f_(f), max_level_(max_level), out_(out) {}

  double change(cd za, const LogJet& fa, cd zb, const LogJet& fb, int level) {
    const double d = normalize_phase(fb.value.phase() - fa.value.phase());
    const double predicted = (0.5 * (fa.dlog + fb.dlog) * (zb - za)).imag();
    if (std::abs(predicted) < std::numbers::pi / 2.0 && std::abs(d) < std::numbers::pi / 2.0 &&
        std::abs(d - predicted) < std::numbers::pi / 4.0) {
      return d;
    }
    if (level >= max_level_) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "winding_number: phase not resolved near %.6g%+.6gi at the sample cap; "
                    "a zero may lie on the boundary",
                    za.real(), za.imag());
      throw BoundaryZeroError(buf, za);
    }
    const cd zm = 0.5 * (za + zb);
    const LogJet fm = eval_on_boundary(f_, zm);
    out_.log_mags.push_back(fm.value.log_mag());
    return change(za, fa, zm, fm, level + 1) + change(zm, fm, zb, fb, level + 1);
  }

 private:
  const LogJetFn& f_;
  int max_level_;
  BoundaryScan& out_;
};

BoundaryScan scan_boundary(const LogJetFn& f, const ComplexBox& r, const WindingOptions& opt) {
  if (!(r.re_hi > r.re_lo && r.im_hi > r.im_lo)) throw InvalidArgument("winding_number: degenerate rectangle");
  if (opt.samples_per_side < 1 || opt.max_samples_per_side < opt.samples_per_side) {
    throw InvalidArgument("winding_number: bad sample counts");
  }
  int max_level = 0;
  while ((static_cast<long>(opt.samples_per_side) << (max_level + 1)) <= opt.max_samples_per_side) ++max_level;

  BoundaryScan out;
  SideWalker walker(f, max_level, out);
  const std::array<cd, 5> corners{cd(r.re_lo, r.im_lo), cd(r.re_hi, r.im_lo), cd(r.re_hi, r.im_hi),
                                  cd(r.re_lo, r.im_hi), cd(r.re_lo, r.im_lo)};
  const int n = opt.samples_per_side;
  double total = 0.0;
  cd z_prev = corners[0];
  LogJet f_prev = eval_on_boundary(f, z_prev);
  out.log_mags.push_back(f_prev.value.log_mag());
  for (int side = 0; side < 4; ++side) {
    for (int k = 1; k <= n; ++k) {
      const cd z = k == n ? corners[side + 1] : corners[side] + (corners[side + 1] - corners[side]) * (double(k) / n);
      const LogJet fz = eval_on_boundary(f, z);
      out.log_mags.push_back(fz.value.log_mag());
      total += walker.change(z_prev, f_prev, z, fz, 0);
      z_prev = z;
      f_prev = fz;
    }
  }
  const double turns = total / (2.0 * std::numbers::pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6) {
    throw ConvergenceError("winding_number: total phase change is not a multiple of 2 pi");
  }
  out.winding = static_cast<int>(rounded);
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

bool inside(const ComplexBox& r, cd z) {
  return z.real() >= r.re_lo && z.real() <= r.re_hi && z.imag() >= r.im_lo && z.imag() <= r.im_hi;
}

std::optional<ZeroRoot> newton(const LogJetFn& f, const ComplexBox& r, const ZeroScanOptions& opt) {
  cd z(0.5 * (r.re_lo + r.re_hi), 0.5 * (r.im_lo + r.im_hi));
  for (int step = 1; step <= opt.max_newton_steps; ++step) {
    LogJet j;
    try {
      j = f(z);
    } catch (const MagnitudeUnderflow&) {
      return ZeroRoot{z, -INFINITY, step - 1, 1};
    } catch (const ConvergenceError&) {
      return std::nullopt;
    }
    if (j.dlog == 0.0 || !std::isfinite(std::abs(j.dlog))) return std::nullopt;
    const cd delta = 1.0 / j.dlog;
    z -= delta;
    if (!inside(r, z)) return std::nullopt;
    if (std::abs(delta) <= opt.newton_tolerance * (1.0 + std::abs(z))) {
      double residual = -INFINITY;
      try {
        residual = f(z).value.log_mag();
      } catch (const MagnitudeUnderflow&) {
      }
      return ZeroRoot{z, residual, step, 1};
    }
  }
  return std::nullopt;
}

// Fixed split offsets (fractions of the width) tried in order after boundary trouble.
constexpr std::array<double, 6> kJitter{0.0, 0.0731, -0.0517, 0.1129, -0.0913, 0.0377};

void subdivide(const LogJetFn& f, const ComplexBox& r, int w, int depth, const ZeroScanOptions& opt,
               ZeroCertificate& cert) {
  if (w == 0) return;
  if (w == 1) {
    if (auto root = newton(f, r, opt)) {
      cert.roots.push_back(*root);
      return;
    }
  }
  if (depth >= opt.max_depth) {
    const cd c(0.5 * (r.re_lo + r.re_hi), 0.5 * (r.im_lo + r.im_hi));
    double lm = -INFINITY;
    try {
      lm = f(c).value.log_mag();
    } catch (const MagnitudeUnderflow&) {
    }
    cert.roots.push_back(ZeroRoot{c, lm, 0, w});
    return;
  }
  const int tries = std::min<int>(opt.max_retries + 1, static_cast<int>(kJitter.size()));
  for (int t = 0; t < tries; ++t) {
    const double sx = 0.5 * (r.re_lo + r.re_hi) + kJitter[t] * (r.re_hi - r.re_lo);
    const double sy = 0.5 * (r.im_lo + r.im_hi) + kJitter[t] * (r.im_hi - r.im_lo);
    const std::array<ComplexBox, 4> kids{ComplexBox{r.re_lo, sx, r.im_lo, sy}, ComplexBox{sx, r.re_hi, r.im_lo, sy},
                                         ComplexBox{r.re_lo, sx, sy, r.im_hi}, ComplexBox{sx, r.re_hi, sy, r.im_hi}};
    std::array<int, 4> wk{};
    try {
      for (int k = 0; k < 4; ++k) wk[k] = scan_boundary(f, kids[k], opt.winding).winding;
    } catch (const BoundaryZeroError&) {
      continue;
    } catch (const ConvergenceError&) {
      continue;
    }
    if (wk[0] + wk[1] + wk[2] + wk[3] != w) continue;
    for (int k = 0; k < 4; ++k) subdivide(f, kids[k], wk[k], depth + 1, opt, cert);
    return;
  }
  cert.complete = false;
  cert.unresolved.push_back(r);
}

}  // namespace

int winding_number(const LogJetFn& f, const ComplexBox& rect, const WindingOptions& options) {
  return scan_boundary(f, rect, options).winding;
}

ZeroCertificate find_zeros(const LogJetFn& f, const ComplexBox& rect, const ZeroScanOptions& options) {
  ZeroCertificate cert;
  cert.rectangle = rect;
  const BoundaryScan top = scan_boundary(f, rect, options.winding);
  cert.winding = top.winding;
  cert.boundary_median_log_mag = median(top.log_mags);
  if (top.winding < 0) throw InvalidArgument("find_zeros: negative winding, function has poles");
  subdivide(f, rect, top.winding, 0, options, cert);
  return cert;
}

ZeroCertificate find_zeros(const ConvexPotential& p, double lambda, const ComplexBox& rect,
                           const ZeroScanOptions& options, const QuadratureOptions& quadrature) {
  ZeroCertificate cert = find_zeros(scriptF_log_jet(p, lambda, quadrature), rect, options);
  cert.lambda = lambda;
  return cert;
}

DeficiencyReport resonance_deficiency(const ConvexPotential& p, const std::vector<double>& lambdas,
                                      const ComplexBox& region, int grid, const QuadratureOptions& quadrature) {
  if (p.dimension() != 1) throw InvalidArgument("resonance_deficiency: one-dimensional potential required");
  if (grid < 8) throw InvalidArgument("resonance_deficiency: grid must be at least 8 per axis");
  if (lambdas.empty()) throw InvalidArgument("resonance_deficiency: empty lambda list");
  if (!(region.re_hi >= region.re_lo && region.im_hi >= region.im_lo)) {
    throw InvalidArgument("resonance_deficiency: malformed region");
  }
  std::vector<double> re(grid), im(grid), u(grid);
  for (int i = 0; i < grid; ++i) {
    re[i] = region.re_lo + (region.re_hi - region.re_lo) * i / (grid - 1);
    im[i] = region.im_lo + (region.im_hi - region.im_lo) * i / (grid - 1);
    u[i] = u_limit(p, re[i]);
  }
  DeficiencyReport report;
  report.region = region;
  for (double lambda : lambdas) {
    DeficiencyTrendEntry e{lambda, INFINITY, cd(re[0], im[0])};
    for (int j = 0; j < grid; ++j) {
      for (int i = 0; i < grid; ++i) {
        const cd xi(re[i], im[j]);
        double dval = -INFINITY;
        try {
          dval = log_scriptF(p, xi, lambda, quadrature).logF.log_mag() / (2.0 * lambda) - u[i];
        } catch (const MagnitudeUnderflow&) {
        }
        if (dval < e.min_deficiency) {
          e.min_deficiency = dval;
          e.argmin_xi = xi;
        }
      }
    }
    report.trend.push_back(e);
  }
  const DeficiencyTrendEntry& last = report.trend.back();
  report.lambda = last.lambda;
  report.min_deficiency = last.min_deficiency;
  report.argmin_xi = last.argmin_xi;
  report.im_at_argmin = last.argmin_xi.imag();
  return report;
}

}  // namespace bdl
