// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <complex>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bdl/divsolve1d.hpp"
#include "bdl/harness.hpp"
#include "bdl/kernel1d.hpp"
#include "bdl/legendre.hpp"
#include "bdl/rng.hpp"
#include "bdl/scriptf.hpp"
#include "bdl/zeroscan.hpp"

namespace {

namespace fs = std::filesystem;
using bdl::catalog;
using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++g_failures;
  std::printf("%s [%d] %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* pattern, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> geom(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  v.back() = hi;
  return v;
}

double phase_gap(double a, double b) { return std::abs(bdl::normalize_phase(a - b)); }

// 1. log F for x^2/2 against lambda xi^2 + (1/2) ln(pi / lambda).
Outcome gaussian_scriptf() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = catalog("quadratic", {1.0});
  std::vector<cd> xis;
  for (double r : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (int k = 0; k < 5; ++k) xis.push_back(std::polar(r, 0.1 + 2.0 * kPi * k / 5.0));
  }
  double worst = 0.0;
  for (double lambda : {1.0, 10.0, 100.0, 1000.0}) {
    for (cd xi : xis) {
      const auto s = bdl::log_scriptF(p, xi, lambda);
      const cd expect = lambda * xi * xi + 0.5 * std::log(kPi / lambda);
      worst = std::max({worst, std::abs(s.logF.log_mag() - expect.real()), phase_gap(s.logF.phase(), expect.imag())});
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-8 && t < 5.0,
          fmt("max |log F - closed form| = %.3g over 4 lambdas x 25 xi (tol 1e-8); runtime %.2fs (limit 5s)", worst, t)};
}

// 2. Legendre identities.
Outcome legendre_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> xs(100);
  for (int i = 0; i < 100; ++i) xs[i] = -2.0 + 4.0 * i / 99.0;
  double worst = 0.0;
  for (const auto& p : {catalog("quadratic", {1.0}), catalog("quartic", {1.0, 0.25}),
                        catalog("analytic_trig", {1.0, 0.025, 6.0})}) {
    worst = std::max(worst, bdl::inverse_identity_defect(p, xs));
  }
  const double tau2 = bdl::tau(catalog("quartic", {1.0, 0.25}), 2.0).tau[0];
  const double t = seconds_since(t0);
  const bool ok = worst <= 1e-6 && std::abs(tau2 - 1.0) <= 1e-10 && t < 1.0;
  return {ok, fmt("max inverse_identity_defect = %.3g (tol 1e-6); |tau(2) - 1| = %.3g (tol 1e-10); runtime %.2fs "
                  "(limit 1s)",
                  worst, std::abs(tau2 - 1.0), t)};
}

// 3. Laplace error ratio under lambda doubling.
Outcome stationary_phase() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = catalog("quartic", {1.0, 0.25});
  const auto lambdas = geom(25.0, 1600.0, 7);
  double lo = INFINITY, hi = -INFINITY;
  for (double xi : {0.0, 0.5, 1.0}) {
    double prev = NAN;
    for (double lambda : lambdas) {
      const double err = std::abs(bdl::log_scriptF(p, xi, lambda).logF.log_mag() - bdl::laplace_log_asymptotic(p, xi, lambda));
      if (!std::isnan(prev)) {
        lo = std::min(lo, err / prev);
        hi = std::max(hi, err / prev);
      }
      prev = err;
    }
  }
  const double t = seconds_since(t0);
  return {lo >= 0.3 && hi <= 0.7 && t < 30.0,
          fmt("doubling ratios in [%.4f, %.4f] (need within [0.3, 0.7]); runtime %.2fs (limit 30s)", lo, hi, t)};
}

// 4. max_xi |r - u| <= C log(lambda) / lambda with C stable to 20%.
Outcome limit_convergence() {
  const auto p = catalog("quartic", {1.0, 0.25});
  std::vector<double> cs;
  for (double lambda : geom(50.0, 1600.0, 6)) {
    double err = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double xi = -1.0 + 0.1 * i;
      err = std::max(err, std::abs(bdl::normalized_log(p, xi, lambda) - bdl::u_limit(p, xi)));
    }
    cs.push_back(err * lambda / std::log(lambda));
  }
  double mean = 0.0;
  for (double c : cs) mean += c / cs.size();
  double spread = 0.0;
  for (double c : cs) spread = std::max(spread, std::abs(c / mean - 1.0));
  const auto [mn, mx] = std::minmax_element(cs.begin(), cs.end());
  return {spread <= 0.2, fmt("C_lambda in [%.4f, %.4f], mean C = %.4f, max relative deviation %.3f (tol 0.20)", *mn,
                             *mx, mean, spread)};
}

// 5. Gaussian Bergman kernel.
Outcome gaussian_kernel() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = catalog("quadratic", {1.0});
  bdl::SplitMix64 rng(5);
  std::vector<std::pair<cd, cd>> pairs;
  const auto disc = [&] { return std::polar(2.0 * std::sqrt(rng.uniform()), 2.0 * kPi * rng.uniform()); };
  for (int i = 0; i < 20; ++i) {
    const cd z = disc();
    pairs.emplace_back(z, disc());
  }
  double worst = 0.0;
  for (double lambda : {50.0, 200.0, 500.0}) {
    for (const auto& [z, w] : pairs) {
      const cd s = z + std::conj(w);
      const double expect = std::log(lambda / (2.0 * kPi)) + lambda * (s * s).real() / 4.0;
      worst = std::max(worst, std::abs(bdl::log_bergman(p, z, w, lambda).logB.log_mag() - expect));
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-6 && t < 60.0,
          fmt("max |log B - closed form| = %.3g over 3 lambdas x 20 pairs (tol 1e-6); runtime %.2fs (limit 60s)", worst,
              t)};
}

// 6. Decay-rate recovery.
Outcome decay_rate() {
  const auto p = catalog("quadratic", {1.0});
  std::vector<std::pair<double, double>> samples;
  for (double lambda : geom(50.0, 800.0, 6)) {
    samples.emplace_back(lambda, bdl::normalized_offdiag(p, {0.0, 1.0}, 0.0, lambda));
  }
  const auto fit = bdl::decay_fit(samples);
  std::vector<std::pair<double, double>> synth;
  for (double lambda = 50.0; lambda <= 800.0; lambda += 50.0) {
    synth.emplace_back(lambda, -2.0 * std::sqrt(lambda * std::log(lambda)) - 3.0);
  }
  const auto sub = bdl::decay_fit(synth);
  const bool ok = std::abs(fit.c / 0.25 - 1.0) <= 0.02 && fit.preferred == bdl::DecayModel::exponential &&
                  std::abs(sub.A - 2.0) <= 1e-6 && sub.preferred == bdl::DecayModel::subexponential;
  return {ok, fmt("pipeline c = %.6f (0.25 +- 2%%), preferred = %s; synthetic A = %.9f (2 +- 1e-6), preferred = %s",
                  fit.c, std::string(bdl::to_string(fit.preferred)).c_str(), sub.A,
                  std::string(bdl::to_string(sub.preferred)).c_str())};
}

// 7. Zero-free certification and injected root.
Outcome zero_free() {
  const auto p = catalog("quadratic", {1.0});
  const bdl::ComplexBox box{-1.0, 1.0, -0.5, 0.5};
  const int w20 = bdl::find_zeros(p, 20.0, box).winding;
  const int w100 = bdl::find_zeros(p, 100.0, box).winding;
  const cd root(0.1, 0.05);
  const auto cert = bdl::find_zeros(bdl::with_injected_root(bdl::scriptF_log_jet(p, 20.0), root), box);
  double err = INFINITY;
  for (const auto& r : cert.roots) err = std::min(err, std::abs(r.xi - root));
  const bool ok = w20 == 0 && w100 == 0 && cert.winding == 1 && cert.roots.size() == 1 && err <= 1e-8;
  return {ok, fmt("winding(lambda=20) = %d, winding(lambda=100) = %d; injected root winding %d, error %.3g (tol 1e-8)",
                  w20, w100, cert.winding, err)};
}

// 8. Deficiency law on [-0.5, 0.5] x [-0.2, 0.2].
Outcome deficiency_law() {
  const auto p = catalog("quadratic", {1.0});
  const auto rep = bdl::resonance_deficiency(p, {50.0, 200.0, 800.0}, {-0.5, 0.5, -0.2, 0.2}, 11);
  bool law = true;
  double overall_min = INFINITY, worst_excess = -INFINITY;
  for (const auto& e : rep.trend) {
    const double im = e.argmin_xi.imag();
    const double tol = std::abs(std::log(kPi / e.lambda) / (4.0 * e.lambda)) + 1e-6;
    const double gap = std::abs(e.min_deficiency - (-im * im / 2.0));
    worst_excess = std::max(worst_excess, gap - tol);
    law = law && gap <= tol && std::abs(std::abs(im) - 0.2) < 1e-12;
    overall_min = std::min(overall_min, e.min_deficiency);
  }
  const bool trend = overall_min >= -0.021;
  std::string d = fmt("law: max(gap - tol) = %.3g (%s); trend: min over lambda = %.6f (need >= -0.021, %s)",
                      worst_excess, law ? "ok" : "violated", overall_min, trend ? "ok" : "violated");
  if (!trend) d += "; closed form -0.02 + ln(pi/lambda)/(4 lambda) is below -0.021 for every lambda in the set";
  return {law && trend, d};
}

// 9. Uniformity of bound_ratio_52 and the substitution cross-check.
Outcome weighted_bounds() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = catalog("quadratic", {1.0});
  double mn = INFINITY, mx = 0.0, scaled_mn = INFINITY, scaled_mx = 0.0, cross = 0.0;
  for (double lambda : {10.0, 31.6, 100.0, 316.0, 1000.0}) {
    for (double xi : {0.0, 0.3, -0.3}) {
      const auto ctx = bdl::weight_context(p, cd(xi, 0.0), lambda, 3.0);
      const auto grid = bdl::covering_grid(ctx, 8192);
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto f = bdl::random_mean_zero_input(ctx, grid, 20240101 + seed);
        const double r = bdl::bound_ratio_52(ctx, f).ratio;
        const double c = bdl::conjugated_ratio(ctx, bdl::times_exp_Phi(ctx, f, -2.0)).ratio;
        mn = std::min(mn, r);
        mx = std::max(mx, r);
        scaled_mn = std::min(scaled_mn, r * std::sqrt(lambda));
        scaled_mx = std::max(scaled_mx, r * std::sqrt(lambda));
        cross = std::max(cross, std::abs(c / r - 1.0));
      }
    }
  }
  const double t = seconds_since(t0);
  const bool ok = mx / mn <= 10.0 && cross <= 1e-6 && t < 60.0;
  return {ok, fmt("max/min of bound_ratio_52 = %.3f (tol 10); cross-check max rel diff = %.3g (tol 1e-6); runtime "
                  "%.2fs (limit 60s); diagnostic: max/min of sqrt(lambda) * ratio = %.3f",
                  mx / mn, cross, t, scaled_mx / scaled_mn)};
}

// 10. Harmonicity of log|F| on zero-free boxes.
Outcome harmonicity() {
  const bdl::ComplexBox box{-0.05, 0.05, -0.05, 0.05};
  const double dq = bdl::harmonicity_defect(catalog("quadratic", {1.0}), box, 100.0, 2.5e-4);
  const double d4 = bdl::harmonicity_defect(catalog("quartic", {1.0, 0.25}), box, 100.0, 2.5e-4);
  return {dq <= 1e-4 && d4 <= 1e-4,
          fmt("defect quadratic = %.3g, quartic = %.3g (tol 1e-4) on [-0.05, 0.05]^2, h = 2.5e-4", dq, d4)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 11. Byte-identical CSVs across two runs of every shipped config.
Outcome reproducibility(const fs::path& out) {
  int compared = 0, differing = 0, failed_runs = 0;
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(BDL_ACCEPTANCE_CONFIG_DIR)) {
    if (e.path().extension() == ".toml") configs.push_back(e.path());
  }
  std::sort(configs.begin(), configs.end());
  for (const auto& path : configs) {
    std::vector<std::string> runs;
    for (int jobs : {1, 4}) {
      auto c = bdl::harness::load_config(path);
      c.jobs = jobs;
      c.out = (out / ("run_jobs" + std::to_string(jobs))).string();
      const auto m = bdl::harness::run(c);
      if (m.exit_code != bdl::harness::kExitOk) ++failed_runs;
      for (const auto& name : m.artifacts) {
        if (fs::path(name).extension() == ".csv") runs.push_back(name);
      }
    }
    std::sort(runs.begin(), runs.end());
    runs.erase(std::unique(runs.begin(), runs.end()), runs.end());
    for (const auto& name : runs) {
      ++compared;
      if (slurp(out / "run_jobs1" / name) != slurp(out / "run_jobs4" / name)) ++differing;
    }
  }
  return {compared >= 7 && differing == 0 && failed_runs == 0,
          fmt("%d CSVs from %zu configs compared (jobs 1 vs 4): %d differ; %d runs exited nonzero", compared,
              configs.size(), differing, failed_runs)};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out = fs::temp_directory_path() / "bdl_acceptance";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
      out = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--out DIR]\n", argv[0]);
      return 64;
    }
  }
  fs::remove_all(out);

  report(1, "Gaussian scriptF oracle", gaussian_scriptf);
  report(2, "Legendre identities", legendre_identities);
  report(3, "Stationary-phase law", stationary_phase);
  report(4, "Limit convergence", limit_convergence);
  report(5, "Gaussian kernel oracle", gaussian_kernel);
  report(6, "Decay-rate recovery", decay_rate);
  report(7, "Zero-free certification", zero_free);
  report(8, "Deficiency law", deficiency_law);
  report(9, "Weighted-bound uniformity", weighted_bounds);
  report(10, "Harmonicity", harmonicity);
  report(11, "Reproducibility", [&] { return reproducibility(out); });

  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures;
}
