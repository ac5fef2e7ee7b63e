#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "bdl/errors.hpp"
#include "bdl/scriptf.hpp"

namespace bdl {

/// Uniform grid of n nodes on [x_min, x_max].
struct Grid {
  double x_min = 0.0;
  double x_max = 0.0;
  int n = 0;

  double h() const { return (x_max - x_min) / (n - 1); }
  double x(int i) const { return x_min + i * h(); }
};

/// Complex samples on a grid. The represented function is values[i] * exp(log_scale);
/// the scale keeps exp(2 Phi)-sized data finite when Phi_max is large.
struct GridFunction {
  Grid grid;
  std::vector<std::complex<double>> values;
  double log_scale = 0.0;

  std::complex<double> at(int i) const;
};

/// log of the boundary density exp(4 (Phi - Phi_max)) must stay below this at both ends.
inline constexpr double kGridBoundaryLogWeight = -138.15510557964274;  // ln 1e-60
inline constexpr int kMinGridNodes = 512;
/// Relative tolerance of the mean-zero preconditions.
inline constexpr double kMeanZeroTolerance = 1e-8;

/// Grid on [x_dagger - R, x_dagger + R], R starting at 8 / sqrt(lambda c_low) (or
/// min_half_width if larger) and grown by 1.1 until the boundary invariant holds. d = 1.
Grid covering_grid(const WeightContext& ctx, int n = 4096, double min_half_width = 0.0);

/// Throws InvalidArgument unless n >= 512, x_dagger is interior and
/// 4 (Phi - Phi_max) <= ln 1e-60 at both ends.
void check_grid(const WeightContext& ctx, const Grid& grid);

GridFunction sample(const Grid& grid, const std::function<std::complex<double>(double)>& f);

/// f * exp(k Phi), with exp(k Phi_max) moved into log_scale.
GridFunction times_exp_Phi(const WeightContext& ctx, const GridFunction& f, double k);

/// 4th-order central differences, 4th-order one-sided stencils at the two nodes next to
/// each end. Needs n >= 5.
GridFunction derivative(const GridFunction& f);

/// 4th-order integral over the whole grid, exp(log_scale) included.
std::complex<double> integral(const GridFunction& f);

// log of the weighted L2 norms (trapezoidal rule); -inf for the zero function.
double log_norm_H1(const WeightContext& ctx, const GridFunction& u);  // weight exp(-4 Phi - 2 gamma)
double log_norm_H2(const WeightContext& ctx, const GridFunction& f);  // weight exp(-4 Phi - gamma)
double norm_H1(const WeightContext& ctx, const GridFunction& u);
double norm_H2(const WeightContext& ctx, const GridFunction& f);

/// exp(gamma) (-f' + 4 Phi' f + gamma' f).
GridFunction div_star(const WeightContext& ctx, const GridFunction& f);

/// |int f| exceeds 1e-8 int |f|: no decaying antiderivative exists. For
/// f = exp(2 lambda (xi x - phi)) the offending integral is F(xi, lambda).
class NonzeroMeanError : public InvalidArgument {
 public:
  NonzeroMeanError(const std::string& what, std::complex<double> integral, double abs_integral)
      : InvalidArgument(what), integral_(integral), abs_integral_(abs_integral) {}
  std::complex<double> integral() const { return integral_; }
  double abs_integral() const { return abs_integral_; }

 private:
  std::complex<double> integral_;
  double abs_integral_;
};

/// Canonical antiderivative u(x) = int_{x_min}^x f (4th-order cumulative rule), u(x_min) = 0.
/// Right of x_dagger it is evaluated as -int_x^{x_max} f, equal under the mean-zero
/// precondition; the two branches differ by at most 1e-8 int |f| at the splice.
GridFunction solve_div(const WeightContext& ctx, const GridFunction& f);

enum class BoundKind { lemma51, lemma52, conjugated };
std::string_view to_string(BoundKind k);

/// ratio = lhs / rhs, computed from the logs. Zero input gives ratio 0 with lhs = rhs = 0.
struct BoundReport {
  WeightContext context;
  BoundKind which = BoundKind::lemma51;
  double ratio = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double log_lhs = 0.0;
  double log_rhs = 0.0;
};

/// norm_H1(solve_div(f)) / norm_H2(f).
BoundReport bound_ratio_51(const WeightContext& ctx, const GridFunction& f);

/// norm_H2(f) / norm_H1(div_star f). f must be mean-zero and vanish at the grid ends.
BoundReport bound_ratio_52(const WeightContext& ctx, const GridFunction& f);

/// (int |g|^2 e^{-gamma})^{1/2} / (int |Sg|^2)^{1/2} with Sg = g' - (2 Phi' + gamma') g,
/// i.e. S = e^{2 Phi + gamma} d/dx e^{-2 Phi - gamma}. Requires int g e^{2 Phi} = 0.
BoundReport conjugated_ratio(const WeightContext& ctx, const GridFunction& g);

/// plain: f = psi'. weighted: f = (e^{2 Phi} psi)', whose antiderivative lies in H1 with
/// O(1) weighted size.
enum class InputShape { plain, weighted };
std::string_view to_string(InputShape s);

/// Seeded mean-zero test input built from psi = sum of 3 complex multiples of
/// exp(-1/(1 - s^2)) bumps centred within x_dagger +- 1.5 / sqrt(lambda), each of
/// half-width in [0.75, 1.5] / sqrt(lambda). Support stays inside x_dagger +- 3 / sqrt(lambda).
/// Draw order per bump: centre, half-width, Re and Im of the coefficient (SplitMix64).
GridFunction random_mean_zero_input(const WeightContext& ctx, const Grid& grid, std::uint64_t seed,
                                    InputShape shape = InputShape::plain);

}  // namespace bdl
