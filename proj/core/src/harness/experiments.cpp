#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "bdl/kernel1d.hpp"
#include "bdl/legendre.hpp"
#include "bdl/zeroscan.hpp"

namespace bdl::harness {

namespace detail {

namespace {

using cd = std::complex<double>;
using Row = std::vector<std::string>;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) { return format_number(v); }

Table table(std::vector<std::string> header) {
  Table t;
  t.header = std::move(header);
  return t;
}

Series series(std::string name, std::vector<std::pair<double, double>> points = {}) {
  Series s;
  s.label = std::move(name);
  s.points = std::move(points);
  return s;
}

PlotStyle style(std::string title, std::string x, std::string y, bool log_x = false, bool log_y = false) {
  PlotStyle p;
  p.title = std::move(title);
  p.x_label = std::move(x);
  p.y_label = std::move(y);
  p.log_x = log_x;
  p.log_y = log_y;
  return p;
}

std::string label(const char* name, double v) { return std::string(name) + "=" + num(v); }

// One parallel task's product: rows in order, or the failure that stopped it.
struct Slot {
  std::vector<Row> rows;
  std::optional<std::string> failure;
  std::optional<std::string> note;
};

template <class F>
std::vector<Slot> run_slots(int n, int jobs, F&& body) {
  std::vector<Slot> slots(n);
  parallel_for(n, jobs, [&](int i) {
    try {
      body(i, slots[i]);
    } catch (const std::exception& e) {
      slots[i].failure = e.what();
    }
  });
  return slots;
}

void collect(const std::vector<Slot>& slots, Table& table, ExperimentOutput& out) {
  for (const Slot& s : slots) {
    for (const Row& r : s.rows) table.rows.push_back(r);
    if (s.failure) out.failures.push_back(*s.failure);
    if (s.note) out.notes.push_back(*s.note);
  }
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

// Box nodes, real part fastest; a degenerate imaginary range gives one row.
std::vector<cd> box_points(const ComplexBox& b, int grid) {
  const auto re = linspace(b.re_lo, b.re_hi, b.re_lo == b.re_hi ? 1 : grid);
  const auto im = linspace(b.im_lo, b.im_hi, b.im_lo == b.im_hi ? 1 : grid);
  std::vector<cd> pts;
  for (double y : im) {
    for (double x : re) pts.emplace_back(x, y);
  }
  return pts;
}

QuadratureOptions quadrature(const ExperimentConfig& c) {
  QuadratureOptions q;
  q.rel_tolerance = c.rel_tolerance;
  return q;
}

class Stopwatch {
 public:
  explicit Stopwatch(ExperimentOutput& out, std::string stage) : out_(out), stage_(std::move(stage)) {}
  ~Stopwatch() {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    out_.stages.push_back({stage_, s});
  }

 private:
  ExperimentOutput& out_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void legendre_check(const ExperimentConfig& c, const ConvexPotential& p, ExperimentOutput& out) {
  Stopwatch sw(out, "legendre");
  const auto xs = linspace(c.box.re_lo, c.box.re_hi, c.grid);
  Table t = table({"xi", "tau", "u", "residual", "defect"});
  auto slots = run_slots(static_cast<int>(xs.size()), c.jobs, [&](int i, Slot& s) {
    const double xi = xs[i];
    const LegendrePoint lp = tau(p, xi);
    const double defect = inverse_identity_defect(p, std::span<const double>(&xi, 1));
    s.rows.push_back({num(xi), num(lp.tau[0]), num(lp.u_value), num(lp.residual), num(defect)});
  });
  collect(slots, t, out);
  Series u = series("u(xi)");
  for (const Row& r : t.rows) u.points.emplace_back(std::stod(r[0]), std::stod(r[2]));
  out.plot = {u};
  out.plot_style = style("Legendre limit u", "xi", "u");
  out.tables.push_back({"legendre-check.csv", std::move(t)});
}

void scriptf(const ExperimentConfig& c, const ConvexPotential& p, ExperimentOutput& out) {
  Stopwatch sw(out, "scriptf");
  const auto lambdas = c.lambda.values();
  const auto pts = box_points(c.box, c.grid);
  const int np = static_cast<int>(pts.size());
  const QuadratureOptions q = quadrature(c);
  Table t = table({"re_xi", "im_xi", "lambda", "log_mag", "phase", "r", "laplace_log", "err_est"});
  auto slots = run_slots(static_cast<int>(lambdas.size()) * np, c.jobs, [&](int i, Slot& s) {
    const double lam = lambdas[i / np];
    const cd xi = pts[i % np];
    const double laplace = xi.imag() == 0.0 ? laplace_log_asymptotic(p, xi.real(), lam) : kNaN;
    try {
      const ScriptFSample f = log_scriptF(p, xi, lam, q);
      const double lm = f.logF.log_mag();
      s.rows.push_back({num(xi.real()), num(xi.imag()), num(lam), num(lm), num(f.logF.phase()), num(lm / (2 * lam)),
                        num(laplace), num(f.quadrature_error_estimate)});
    } catch (const MagnitudeUnderflow&) {
      s.rows.push_back({num(xi.real()), num(xi.imag()), num(lam), num(-kInf), num(kNaN), num(-kInf), num(laplace),
                        num(kNaN)});
      s.note = "scriptf: F below working precision at xi=" + num(xi.real()) + (xi.imag() < 0 ? "" : "+") +
               num(xi.imag()) + "i, " + label("lambda", lam) + "; row logged as -inf";
    }
  });
  collect(slots, t, out);
  if (c.box.im_lo == c.box.im_hi) {
    for (double lam : lambdas) {
      Series sr = series(label("lambda", lam));
      for (const Row& r : t.rows) {
        if (std::stod(r[2]) == lam) sr.points.emplace_back(std::stod(r[0]), std::stod(r[5]));
      }
      out.plot.push_back(std::move(sr));
    }
    out.plot_style = style("r(xi, lambda) = log|F| / (2 lambda)", "xi", "r");
  }
  out.tables.push_back({"scriptf.csv", std::move(t)});
}

Table deficiency_trend(const ExperimentConfig& c, const ConvexPotential& p, ExperimentOutput& out) {
  Stopwatch sw(out, "deficiency");
  const auto lambdas = c.lambda.values();
  const QuadratureOptions q = quadrature(c);
  Table t = table({"lambda", "min_deficiency", "re_argmin", "im_argmin"});
  auto slots = run_slots(static_cast<int>(lambdas.size()), c.jobs, [&](int i, Slot& s) {
    const DeficiencyReport r = resonance_deficiency(p, {lambdas[i]}, c.box, c.grid, q);
    s.rows.push_back({num(lambdas[i]), num(r.min_deficiency), num(r.argmin_xi.real()), num(r.argmin_xi.imag())});
    if (r.min_deficiency == -kInf) {
      s.note = "deficiency: F underflows inside the region at " + label("lambda", lambdas[i]);
    }
  });
  collect(slots, t, out);
  Series d = series("min deficiency");
  for (const Row& r : t.rows) d.points.emplace_back(std::stod(r[0]), std::stod(r[1]));
  out.plot = {d};
  out.plot_style = style("Resonance deficiency trend", "lambda", "min deficiency");
  out.plot_style.log_x = true;
  return t;
}

std::string certificate_text(const ZeroCertificate& z) {
  std::ostringstream o;
  const ComplexBox& b = z.rectangle;
  o << "[certificate]\n";
  o << "lambda = " << num(z.lambda) << "\n";
  o << "rectangle = [" << num(b.re_lo) << ", " << num(b.re_hi) << ", " << num(b.im_lo) << ", " << num(b.im_hi)
    << "]\n";
  o << "winding = " << z.winding << "\n";
  o << "complete = " << (z.complete ? "true" : "false") << "\n";
  o << "boundary_median_log_mag = " << num(z.boundary_median_log_mag) << "\n";
  o << "roots = " << z.roots.size() << "\n";
  for (const ZeroRoot& r : z.roots) {
    o << "root = [" << num(r.xi.real()) << ", " << num(r.xi.imag()) << "]  multiplicity = " << r.multiplicity
      << "  newton_steps = " << r.newton_steps << "  residual_log_mag = " << num(r.residual_log_mag) << "\n";
  }
  for (const ComplexBox& u : z.unresolved) {
    o << "unresolved = [" << num(u.re_lo) << ", " << num(u.re_hi) << ", " << num(u.im_lo) << ", " << num(u.im_hi)
      << "]\n";
  }
  return o.str();
}

void zeros(const ExperimentConfig& c, const ConvexPotential& p, ExperimentOutput& out) {
  const auto lambdas = c.lambda.values();
  std::vector<std::string> blocks(lambdas.size());
  {
    Stopwatch sw(out, "certificates");
    const QuadratureOptions q = quadrature(c);
    auto slots = run_slots(static_cast<int>(lambdas.size()), c.jobs, [&](int i, Slot& s) {
      const ZeroCertificate z = find_zeros(p, lambdas[i], c.box, {}, q);
      blocks[i] = certificate_text(z);
      if (!z.complete) {
        s.failure = "zeros: " + std::to_string(z.unresolved.size()) + " unresolved rectangle(s) at " +
                    label("lambda", lambdas[i]);
      }
    });
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i].failure) out.failures.push_back(*slots[i].failure);
      if (blocks[i].empty()) blocks[i] = "[certificate]\nlambda = " + num(lambdas[i]) + "\nerror = failed\n";
    }
  }
  std::string text = "potential = " + p.spec() + "\n";
  for (const auto& b : blocks) text += "\n" + b;
  out.texts.push_back({"zeros.certificate.txt", text});
  out.tables.push_back({"zeros.csv", deficiency_trend(c, p, out)});
}

void kernel_decay(const ExperimentConfig& c, const ConvexPotential& p, ExperimentOutput& out) {
  const auto lambdas = c.lambda.values();
  Table t = table({"lambda", "re_z", "im_z", "re_w", "im_w", "log_mag", "normalized"});
  {
    Stopwatch sw(out, "kernel");
    KernelOptions ko;
    ko.rel_tolerance = c.rel_tolerance;
    auto slots = run_slots(static_cast<int>(lambdas.size()), c.jobs, [&](int i, Slot& s) {
      const KernelSample k = log_bergman(p, c.z, c.w, lambdas[i], ko);
      s.rows.push_back({num(lambdas[i]), num(c.z.real()), num(c.z.imag()), num(c.w.real()), num(c.w.imag()),
                        num(k.logB.log_mag()), num(k.normalized_log_mag)});
    });
    collect(slots, t, out);
  }
  Stopwatch sw(out, "fit");
  std::vector<std::pair<double, double>> samples;
  for (const Row& r : t.rows) samples.emplace_back(std::stod(r[0]), std::stod(r[6]));
  t.footer.push_back({"c", "beta", "A", "rss_exp", "rss_sub", "preferred"});
  try {
    const DecayFit f = decay_fit(samples);
    t.footer.push_back({num(f.c), num(f.beta), num(f.A), num(f.rss_exp), num(f.rss_sub),
                        std::string(to_string(f.preferred))});
  } catch (const InvalidArgument& e) {
    t.footer.push_back({"nan", "nan", "nan", "nan", "nan", "inconclusive"});
    out.notes.push_back(std::string("kernel-decay: fit skipped: ") + e.what());
  }
  Series s = series("normalized log|B|");
  s.points = samples;
  out.plot = {s};
  out.plot_style = style("Off-diagonal kernel decay", "lambda", "normalized log|B|");
  out.tables.push_back({"kernel-decay.csv", std::move(t)});
}

void divsolve_check(const ExperimentConfig& c, const ConvexPotential& p, ExperimentOutput& out) {
  Stopwatch sw(out, "divsolve");
  const auto lambdas = c.lambda.values();
  const int nx = static_cast<int>(c.xi.size()), ns = c.seeds;
  Table t = table({"lambda", "xi", "a", "which", "ratio", "lhs", "rhs", "seed"});
  std::vector<double> cross(lambdas.size() * nx * ns, 0.0);
  auto slots = run_slots(static_cast<int>(cross.size()), c.jobs, [&](int i, Slot& s) {
    const double lam = lambdas[i / (nx * ns)];
    const double xi = c.xi[(i / ns) % nx];
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(i % ns);
    const WeightContext ctx = weight_context(p, cd(xi, 0.0), lam, c.a);
    const Grid g = covering_grid(ctx, c.nodes);
    const GridFunction f = random_mean_zero_input(ctx, g, seed, c.input_shape);
    const BoundReport r51 = bound_ratio_51(ctx, f);
    const BoundReport r52 = bound_ratio_52(ctx, f);
    const BoundReport rc = conjugated_ratio(ctx, times_exp_Phi(ctx, f, -2.0));
    cross[i] = std::abs(rc.ratio / r52.ratio - 1.0);
    for (const BoundReport* r : {&r51, &r52, &rc}) {
      s.rows.push_back({num(lam), num(xi), num(c.a), std::string(to_string(r->which)), num(r->ratio), num(r->lhs),
                        num(r->rhs), std::to_string(seed)});
    }
  });
  collect(slots, t, out);

  t.footer.push_back({"which", "min_ratio", "max_ratio", "max_over_min", "sqrt_lambda_max_over_min"});
  for (const char* which : {"lemma51", "lemma52", "conjugated"}) {
    double lo = kInf, hi = 0.0, slo = kInf, shi = 0.0;
    std::vector<std::pair<double, double>> per_lambda;
    for (const Row& r : t.rows) {
      if (r[3] != which) continue;
      const double lam = std::stod(r[0]), v = std::stod(r[4]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      slo = std::min(slo, v * std::sqrt(lam));
      shi = std::max(shi, v * std::sqrt(lam));
      if (per_lambda.empty() || per_lambda.back().first != lam) per_lambda.emplace_back(lam, 0.0);
      per_lambda.back().second = std::max(per_lambda.back().second, v);
    }
    if (hi == 0.0) continue;
    t.footer.push_back({which, num(lo), num(hi), num(hi / lo), num(shi / slo)});
    out.plot.push_back(series(std::string("max ") + which, per_lambda));
  }
  double worst = 0.0;
  for (double v : cross) worst = std::max(worst, v);
  t.footer.push_back({"substitution_max_rel_diff", num(worst)});
  out.plot_style = style("Weighted bound ratios", "lambda", "max ratio");
  out.plot_style.log_x = out.plot_style.log_y = true;
  out.tables.push_back({"divsolve-check.csv", std::move(t)});
}

void limit_convergence(const ExperimentConfig& c, const ConvexPotential& p, ExperimentOutput& out) {
  Stopwatch sw(out, "limit");
  const auto lambdas = c.lambda.values();
  const auto xs = linspace(c.box.re_lo, c.box.re_hi, c.grid);
  const int nx = static_cast<int>(xs.size());
  const QuadratureOptions q = quadrature(c);
  Table t = table({"lambda", "xi", "r", "u", "abs_err"});
  auto slots = run_slots(static_cast<int>(lambdas.size()) * nx, c.jobs, [&](int i, Slot& s) {
    const double lam = lambdas[i / nx], xi = xs[i % nx];
    const double r = normalized_log(p, cd(xi, 0.0), lam, q);
    const double u = u_limit(p, xi);
    s.rows.push_back({num(lam), num(xi), num(r), num(u), num(std::abs(r - u))});
  });
  collect(slots, t, out);

  // max error per lambda against s = log(lambda) / lambda; C by least squares through 0.
  std::vector<std::pair<double, double>> worst;
  for (double lam : lambdas) {
    double e = -1.0;
    for (const Row& r : t.rows) {
      if (std::stod(r[0]) == lam) e = std::max(e, std::stod(r[4]));
    }
    if (e >= 0.0) worst.emplace_back(lam, e);
  }
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [lam, e] : worst) {
    if (lam <= 1.0) continue;
    const double s = std::log(lam) / lam;
    sxy += s * e;
    sxx += s * s;
  }
  const double C = sxx > 0.0 ? sxy / sxx : kNaN;
  double spread = 0.0;
  t.footer.push_back({"lambda", "max_abs_err", "C_lambda"});
  Series err = series("max |r - u|"), model = series("C log(lambda) / lambda");
  for (const auto& [lam, e] : worst) {
    const double cl = lam > 1.0 ? e * lam / std::log(lam) : kNaN;
    if (lam > 1.0) spread = std::max(spread, std::abs(cl / C - 1.0));
    t.footer.push_back({num(lam), num(e), num(cl)});
    err.points.emplace_back(lam, e);
    if (lam > 1.0) model.points.emplace_back(lam, C * std::log(lam) / lam);
  }
  t.footer.push_back({"C", "max_rel_spread"});
  t.footer.push_back({num(C), num(spread)});
  out.plot = {err, model};
  out.plot_style = style("Convergence of r to u", "lambda", "max |r - u|");
  out.plot_style.log_x = out.plot_style.log_y = true;
  out.tables.push_back({"limit-convergence.csv", std::move(t)});
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& c) {
  ExperimentOutput out;
  const ConvexPotential p = parse_potential(c.potential);
  switch (*c.experiment) {
    case Experiment::legendre_check: legendre_check(c, p, out); break;
    case Experiment::scriptf: scriptf(c, p, out); break;
    case Experiment::zeros: zeros(c, p, out); break;
    case Experiment::kernel_decay: kernel_decay(c, p, out); break;
    case Experiment::divsolve_check: divsolve_check(c, p, out); break;
    case Experiment::limit_convergence: limit_convergence(c, p, out); break;
    case Experiment::resonance_trend: out.tables.push_back({"resonance-trend.csv", deficiency_trend(c, p, out)}); break;
  }
  return out;
}

}  // namespace detail

}  // namespace bdl::harness
