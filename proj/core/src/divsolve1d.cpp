#include "bdl/divsolve1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bdl/errors.hpp"
#include "bdl/rng.hpp"

namespace bdl {

using cd = std::complex<double>;

std::complex<double> GridFunction::at(int i) const { return values.at(i) * std::exp(log_scale); }

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_1d(const WeightContext& ctx, const char* what) {
  if (ctx.potential.dimension() != 1) throw InvalidArgument(std::string(what) + ": d = 1 only");
}

void require_shape(const GridFunction& f, const char* what) {
  if (f.grid.n < 5 || static_cast<int>(f.values.size()) != f.grid.n || !(f.grid.x_max > f.grid.x_min)) {
    throw InvalidArgument(std::string(what) + ": malformed grid function");
  }
}

double boundary_log_weight(const WeightContext& ctx, double x) { return 4.0 * (ctx.Phi(x) - ctx.Phi_max); }

// Per-node Phi - Phi_max, Phi', gamma, gamma'.
struct NodeWeights {
  std::vector<double> Phi_tilde, dPhi, gamma, dgamma;
};

NodeWeights node_weights(const WeightContext& ctx, const Grid& g) {
  NodeWeights w;
  w.Phi_tilde.resize(g.n);
  w.dPhi.resize(g.n);
  w.gamma.resize(g.n);
  w.dgamma.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    w.Phi_tilde[i] = ctx.Phi(x) - ctx.Phi_max;
    w.dPhi[i] = ctx.dPhi(x);
    w.gamma[i] = ctx.gamma(x);
    w.dgamma[i] = ctx.dgamma(x);
  }
  return w;
}

// log of the trapezoidal integral of |v_i|^2 exp(logw_i), v carrying no scale.
double log_weighted_sq(const Grid& g, const std::vector<cd>& v, const std::vector<double>& logw) {
  std::vector<double> t(g.n);
  double top = kNegInf;
  for (int i = 0; i < g.n; ++i) {
    const double m = std::abs(v[i]);  // not std::norm: its square underflows first
    t[i] = m > 0.0 ? 2.0 * std::log(m) + logw[i] : kNegInf;
    top = std::max(top, t[i]);
  }
  if (top == kNegInf) return kNegInf;
  double s = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double wt = (i == 0 || i == g.n - 1) ? 0.5 : 1.0;
    s += wt * std::exp(t[i] - top);
  }
  return top + std::log(s * g.h());
}

// Cumulative integral with u_0 = 0; interval [x_i, x_{i+1}] uses the cubic through four
// neighbouring nodes.
std::vector<cd> cumulative(const std::vector<cd>& f, double h) {
  const int n = static_cast<int>(f.size());
  std::vector<cd> u(n);
  u[0] = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    cd piece;
    if (i == 0) {
      piece = 9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3];
    } else if (i == n - 2) {
      piece = 9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4];
    } else {
      piece = -f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2];
    }
    u[i + 1] = u[i] + piece * (h / 24.0);
  }
  return u;
}

double abs_integral(const GridFunction& f) {
  double s = 0.0;
  for (int i = 0; i < f.grid.n; ++i) s += ((i == 0 || i == f.grid.n - 1) ? 0.5 : 1.0) * std::abs(f.values[i]);
  return s * f.grid.h();
}

void require_mean_zero(cd integral, double abs_int, const char* what) {
  if (std::abs(integral) > kMeanZeroTolerance * abs_int) {
    throw NonzeroMeanError(std::string(what) + ": mean-zero precondition violated, |int f| = " +
                               std::to_string(std::abs(integral)) + " vs int |f| = " + std::to_string(abs_int),
                           integral, abs_int);
  }
}

// Compact support: the two outermost nodes at each end are negligible.
void require_interior_support(const GridFunction& f, const char* what) {
  double top = 0.0;
  for (const cd& v : f.values) top = std::max(top, std::abs(v));
  const int n = f.grid.n;
  for (int i : {0, 1, n - 2, n - 1}) {
    if (std::abs(f.values[i]) > 1e-12 * top) {
      throw InvalidArgument(std::string(what) + ": input must vanish near the grid ends");
    }
  }
}

bool is_zero(const GridFunction& f) {
  return std::all_of(f.values.begin(), f.values.end(), [](const cd& v) { return v == cd(0.0); });
}

BoundReport make_report(const WeightContext& ctx, BoundKind which, double log_lhs, double log_rhs) {
  BoundReport r{ctx, which};
  r.log_lhs = log_lhs;
  r.log_rhs = log_rhs;
  r.lhs = std::exp(log_lhs);
  r.rhs = std::exp(log_rhs);
  r.ratio = std::exp(log_lhs - log_rhs);
  return r;
}

BoundReport zero_report(const WeightContext& ctx, BoundKind which) {
  BoundReport r{ctx, which};
  r.log_lhs = r.log_rhs = kNegInf;
  return r;
}

// The bump exp(-1/(1 - s^2)) supported on (-1, 1) and its derivative.
double bump(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }
double bump_derivative(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return -2.0 * s / (q * q) * std::exp(-1.0 / q);
}

}  // namespace

Grid covering_grid(const WeightContext& ctx, int n, double min_half_width) {
  require_1d(ctx, "covering_grid");
  if (n < kMinGridNodes) throw InvalidArgument("covering_grid: n must be at least 512");
  const double c_low = ctx.potential.convexity_bounds().low;
  const double xd = ctx.x_dagger[0];
  double R = std::max(8.0 / std::sqrt(ctx.lambda * c_low), min_half_width);
  for (int iter = 0; iter < 200; ++iter) {
    if (boundary_log_weight(ctx, xd - R) <= kGridBoundaryLogWeight &&
        boundary_log_weight(ctx, xd + R) <= kGridBoundaryLogWeight) {
      return Grid{xd - R, xd + R, n};
    }
    R *= 1.1;
  }
  throw ConvergenceError("covering_grid: boundary weight never dropped below 1e-60");
}

void check_grid(const WeightContext& ctx, const Grid& grid) {
  require_1d(ctx, "check_grid");
  if (grid.n < kMinGridNodes) throw InvalidArgument("grid invariant: n must be at least 512");
  const double xd = ctx.x_dagger[0];
  if (!(grid.x_min < xd && xd < grid.x_max)) throw InvalidArgument("grid invariant: x_dagger not interior");
  if (!(boundary_log_weight(ctx, grid.x_min) <= kGridBoundaryLogWeight &&
        boundary_log_weight(ctx, grid.x_max) <= kGridBoundaryLogWeight)) {
    throw InvalidArgument("grid invariant: exp(4 (Phi - Phi_max)) at the grid ends exceeds 1e-60");
  }
}

GridFunction sample(const Grid& grid, const std::function<std::complex<double>(double)>& f) {
  GridFunction out{grid, std::vector<cd>(grid.n)};
  for (int i = 0; i < grid.n; ++i) out.values[i] = f(grid.x(i));
  return out;
}

GridFunction times_exp_Phi(const WeightContext& ctx, const GridFunction& f, double k) {
  require_1d(ctx, "times_exp_Phi");
  require_shape(f, "times_exp_Phi");
  GridFunction out = f;
  for (int i = 0; i < f.grid.n; ++i) {
    if (f.values[i] != cd(0.0)) out.values[i] *= std::exp(k * (ctx.Phi(f.grid.x(i)) - ctx.Phi_max));
  }
  out.log_scale += k * ctx.Phi_max;
  return out;
}

GridFunction derivative(const GridFunction& f) {
  require_shape(f, "derivative");
  const int n = f.grid.n;
  const auto& v = f.values;
  const double s = 1.0 / (12.0 * f.grid.h());
  GridFunction d{f.grid, std::vector<cd>(n), f.log_scale};
  d.values[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) * s;
  d.values[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) * s;
  for (int i = 2; i < n - 2; ++i) d.values[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) * s;
  d.values[n - 2] = (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) * s;
  d.values[n - 1] = (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]) * s;
  return d;
}

std::complex<double> integral(const GridFunction& f) {
  require_shape(f, "integral");
  return cumulative(f.values, f.grid.h()).back() * std::exp(f.log_scale);
}

double log_norm_H1(const WeightContext& ctx, const GridFunction& u) {
  require_shape(u, "norm_H1");
  check_grid(ctx, u.grid);
  const NodeWeights w = node_weights(ctx, u.grid);
  std::vector<double> logw(u.grid.n);
  for (int i = 0; i < u.grid.n; ++i) logw[i] = -4.0 * w.Phi_tilde[i] - 2.0 * w.gamma[i];
  return 0.5 * log_weighted_sq(u.grid, u.values, logw) + u.log_scale - 2.0 * ctx.Phi_max;
}

double log_norm_H2(const WeightContext& ctx, const GridFunction& f) {
  require_shape(f, "norm_H2");
  check_grid(ctx, f.grid);
  const NodeWeights w = node_weights(ctx, f.grid);
  std::vector<double> logw(f.grid.n);
  for (int i = 0; i < f.grid.n; ++i) logw[i] = -4.0 * w.Phi_tilde[i] - w.gamma[i];
  return 0.5 * log_weighted_sq(f.grid, f.values, logw) + f.log_scale - 2.0 * ctx.Phi_max;
}

double norm_H1(const WeightContext& ctx, const GridFunction& u) { return std::exp(log_norm_H1(ctx, u)); }
double norm_H2(const WeightContext& ctx, const GridFunction& f) { return std::exp(log_norm_H2(ctx, f)); }

GridFunction div_star(const WeightContext& ctx, const GridFunction& f) {
  require_shape(f, "div_star");
  check_grid(ctx, f.grid);
  const NodeWeights w = node_weights(ctx, f.grid);
  GridFunction out = derivative(f);
  for (int i = 0; i < f.grid.n; ++i) {
    out.values[i] = std::exp(w.gamma[i]) * (-out.values[i] + (4.0 * w.dPhi[i] + w.dgamma[i]) * f.values[i]);
  }
  return out;
}

GridFunction solve_div(const WeightContext& ctx, const GridFunction& f) {
  require_shape(f, "solve_div");
  check_grid(ctx, f.grid);
  const int n = f.grid.n;
  const double h = f.grid.h();
  const std::vector<cd> left = cumulative(f.values, h);
  require_mean_zero(left.back(), abs_integral(f), "solve_div");
  // The weight exp(-4 Phi) reaches 1e60 at the ends, so roundoff carried across the
  // support would dominate the H1 norm. Right of x_dagger, integrate back from x_max.
  std::vector<cd> reversed(f.values.rbegin(), f.values.rend());
  const std::vector<cd> right = cumulative(reversed, h);
  GridFunction u{f.grid, std::vector<cd>(n), f.log_scale};
  const double xd = ctx.x_dagger[0];
  for (int i = 0; i < n; ++i) u.values[i] = f.grid.x(i) <= xd ? left[i] : -right[n - 1 - i];
  return u;
}

std::string_view to_string(BoundKind k) {
  switch (k) {
    case BoundKind::lemma51: return "lemma51";
    case BoundKind::lemma52: return "lemma52";
    case BoundKind::conjugated: return "conjugated";
  }
  return "unknown";
}

BoundReport bound_ratio_51(const WeightContext& ctx, const GridFunction& f) {
  require_shape(f, "bound_ratio_51");
  if (is_zero(f)) {
    check_grid(ctx, f.grid);
    return zero_report(ctx, BoundKind::lemma51);
  }
  const GridFunction u = solve_div(ctx, f);
  return make_report(ctx, BoundKind::lemma51, log_norm_H1(ctx, u), log_norm_H2(ctx, f));
}

BoundReport bound_ratio_52(const WeightContext& ctx, const GridFunction& f) {
  require_shape(f, "bound_ratio_52");
  check_grid(ctx, f.grid);
  if (is_zero(f)) throw InvalidArgument("bound_ratio_52: div_star f vanishes identically (f = 0)");
  require_interior_support(f, "bound_ratio_52");
  require_mean_zero(integral(GridFunction{f.grid, f.values}), abs_integral(f), "bound_ratio_52");
  const GridFunction d = div_star(ctx, f);
  const double log_rhs = log_norm_H1(ctx, d);
  if (log_rhs == kNegInf) throw InvalidArgument("bound_ratio_52: div_star f vanishes identically");
  return make_report(ctx, BoundKind::lemma52, log_norm_H2(ctx, f), log_rhs);
}

BoundReport conjugated_ratio(const WeightContext& ctx, const GridFunction& g) {
  require_shape(g, "conjugated_ratio");
  check_grid(ctx, g.grid);
  if (is_zero(g)) return zero_report(ctx, BoundKind::conjugated);
  require_interior_support(g, "conjugated_ratio");
  const GridFunction f = times_exp_Phi(ctx, g, 2.0);
  require_mean_zero(integral(GridFunction{f.grid, f.values}), abs_integral(f), "conjugated_ratio");

  const NodeWeights w = node_weights(ctx, g.grid);
  const GridFunction dg = derivative(g);
  std::vector<cd> Sg(g.grid.n);
  std::vector<double> log_e_minus_gamma(g.grid.n), zero(g.grid.n, 0.0);
  for (int i = 0; i < g.grid.n; ++i) {
    Sg[i] = dg.values[i] - (2.0 * w.dPhi[i] + w.dgamma[i]) * g.values[i];
    log_e_minus_gamma[i] = -w.gamma[i];
  }
  const double log_lhs = 0.5 * log_weighted_sq(g.grid, g.values, log_e_minus_gamma) + g.log_scale;
  const double log_rhs = 0.5 * log_weighted_sq(g.grid, Sg, zero) + g.log_scale;
  if (log_rhs == kNegInf) throw InvalidArgument("conjugated_ratio: Sg vanishes identically");
  return make_report(ctx, BoundKind::conjugated, log_lhs, log_rhs);
}

std::string_view to_string(InputShape s) {
  return s == InputShape::plain ? "plain" : "weighted";
}

GridFunction random_mean_zero_input(const WeightContext& ctx, const Grid& grid, std::uint64_t seed,
                                    InputShape shape) {
  require_1d(ctx, "random_mean_zero_input");
  check_grid(ctx, grid);
  constexpr int kBumps = 3;
  SplitMix64 rng(seed);
  const double unit = 1.0 / std::sqrt(ctx.lambda);
  const double xd = ctx.x_dagger[0];
  double centre[kBumps], width[kBumps];
  cd coeff[kBumps];
  for (int k = 0; k < kBumps; ++k) {
    centre[k] = xd + rng.uniform(-1.5, 1.5) * unit;
    width[k] = rng.uniform(0.75, 1.5) * unit;
    const double re = rng.uniform(-1.0, 1.0);
    const double im = rng.uniform(-1.0, 1.0);
    coeff[k] = cd(re, im);
  }
  if (xd - 3.0 * unit <= grid.x(2) || xd + 3.0 * unit >= grid.x(grid.n - 3)) {
    throw InvalidArgument("random_mean_zero_input: grid too narrow for the input support");
  }
  const auto psi = [&](double x) {
    cd v = 0.0;
    for (int k = 0; k < kBumps; ++k) v += coeff[k] * bump((x - centre[k]) / width[k]);
    return v;
  };
  const auto dpsi = [&](double x) {
    cd v = 0.0;
    for (int k = 0; k < kBumps; ++k) v += coeff[k] * bump_derivative((x - centre[k]) / width[k]) / width[k];
    return v;
  };
  if (shape == InputShape::plain) return sample(grid, dpsi);
  // (e^{2 Phi} psi)' = e^{2 Phi} (psi' + 2 Phi' psi)
  GridFunction f = sample(grid, [&](double x) {
    const cd v = dpsi(x) + 2.0 * ctx.dPhi(x) * psi(x);
    return v == cd(0.0) ? v : v * std::exp(2.0 * (ctx.Phi(x) - ctx.Phi_max));
  });
  f.log_scale = 2.0 * ctx.Phi_max;
  return f;
}

}  // namespace bdl
