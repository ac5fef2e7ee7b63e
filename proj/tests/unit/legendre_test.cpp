#include <cmath>
#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "bdl/errors.hpp"
#include "bdl/legendre.hpp"
#include "bdl/scriptf.hpp"

namespace {

using bdl::catalog;

std::vector<double> samples(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

// mpmath roots of s + s^3 = xi.
TEST(Tau, QuarticReferenceValues) {
  const auto p = catalog("quartic", {1.0, 0.25});
  EXPECT_NEAR(bdl::tau(p, 2.0).tau[0], 1.0, 1e-10);
  EXPECT_NEAR(bdl::u_limit(p, 2.0), 1.25, 1e-10);
  EXPECT_NEAR(bdl::tau(p, 0.5).tau[0], 0.42385379906978327138, 1e-12);
  EXPECT_NEAR(bdl::u_limit(p, 0.5), 0.11403216390469667418, 1e-12);
  EXPECT_NEAR(bdl::tau(p, 1.0).tau[0], 0.68232780382801932737, 1e-12);
  EXPECT_NEAR(bdl::u_limit(p, 1.0), 0.39535304490182248886, 1e-12);
}

TEST(Tau, QuadraticIsLinear) {
  const auto p = catalog("quadratic", {4.0});
  for (double xi : samples(-3.0, 3.0, 13)) {
    EXPECT_NEAR(bdl::tau(p, xi).tau[0], xi / 4.0, 1e-12);
    EXPECT_NEAR(bdl::u_limit(p, xi), xi * xi / 8.0, 1e-12);
  }
  const auto q = catalog("quadratic", {1.0, 2.0});
  bdl::Vector xi(2);
  xi << 1.0, -1.0;
  const auto lp = bdl::tau(q, xi);
  EXPECT_NEAR(lp.tau[0], 1.0, 1e-12);
  EXPECT_NEAR(lp.tau[1], -0.5, 1e-12);
  EXPECT_NEAR(lp.u_value, 0.5 + 0.25, 1e-12);
}

TEST(Tau, ReportsResidualAndIterations) {
  const auto lp = bdl::tau(catalog("cosh", {}), 3.0);
  EXPECT_NEAR(lp.tau[0], std::asinh(3.0), 1e-12);
  EXPECT_LE(lp.residual, 1e-10 * 4.0);
  EXPECT_GT(lp.newton_iterations, 0);
}

TEST(Tau, OutOfRangeRaisesWithLastIterate) {
  bdl::TauOptions opt;
  opt.search_half_width = 2.0;
  opt.max_iterations = 20;
  // cosh' = sinh; sinh(2) < 100, so no solution inside the search window.
  try {
    bdl::tau(catalog("cosh", {}), 100.0, opt);
    FAIL() << "expected TauConvergenceError";
  } catch (const bdl::TauConvergenceError& e) {
    EXPECT_EQ(e.last_iterate().size(), 1);
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(Legendre, InverseIdentityHoldsForCatalog) {
  const auto xs = samples(-2.0, 2.0, 100);
  for (const auto& p : {catalog("quadratic", {1.0}), catalog("quartic", {1.0, 0.25}),
                        catalog("analytic_trig", {1.0, 0.025, 6.0}), catalog("cosh", {}),
                        catalog("smooth_bump", {1.0, 0.1})}) {
    EXPECT_LE(bdl::inverse_identity_defect(p, xs), 1e-6) << p.spec();
    for (double x : xs) {
      EXPECT_NEAR(bdl::tau(p, p.derivative(x)).tau[0], x, 1e-8 * (1.0 + std::abs(x))) << p.spec();
    }
  }
}

TEST(Legendre, TauIsStrictlyIncreasing) {
  for (const auto& p : {catalog("quartic", {1.0, 0.25}), catalog("analytic_trig", {1.0, 0.025, 6.0}),
                        catalog("smooth_bump", {1.0, 0.1})}) {
    double prev = -INFINITY;
    for (double xi : samples(-3.0, 3.0, 241)) {
      const double t = bdl::tau(p, xi).tau[0];
      EXPECT_GT(t, prev) << p.spec() << " xi=" << xi;
      prev = t;
    }
  }
}

TEST(Legendre, LimitIsConvex) {
  for (const auto& p : {catalog("quartic", {1.0, 0.25}), catalog("analytic_trig", {1.0, 0.025, 6.0}),
                        catalog("cosh", {})}) {
    const double h = 0.01;
    for (double xi : samples(-2.0, 2.0, 81)) {
      const double d2 = bdl::u_limit(p, xi + h) - 2.0 * bdl::u_limit(p, xi) + bdl::u_limit(p, xi - h);
      EXPECT_GE(d2, -1e-8) << p.spec() << " xi=" << xi;
    }
  }
  // Along a line in d = 2.
  const auto q = catalog("quadratic", {1.0, 3.0});
  bdl::Vector dir(2), base(2);
  dir << 0.6, 0.8;
  base << -1.0, 0.5;
  for (double t = -1.0; t <= 1.0; t += 0.1) {
    const bdl::Vector x = base + t * dir;
    const double d2 = bdl::u_limit(q, bdl::Vector(x + 0.01 * dir)) - 2.0 * bdl::u_limit(q, x) +
                      bdl::u_limit(q, bdl::Vector(x - 0.01 * dir));
    EXPECT_GE(d2, -1e-8);
  }
}

TEST(Legendre, WeightMaximizerMatchesTau) {
  for (const auto& p : {catalog("quartic", {1.0, 0.25}), catalog("analytic_trig", {1.0, 0.025, 6.0})}) {
    for (double re : {-0.8, 0.0, 0.35, 1.2}) {
      const auto ctx = bdl::weight_context(p, std::complex<double>(re, 0.4), 50.0);
      EXPECT_NEAR(ctx.x_dagger[0], bdl::tau(p, re).tau[0], 1e-10) << p.spec();
      EXPECT_NEAR(ctx.Phi_max, 50.0 * bdl::u_limit(p, re), 1e-8);
    }
  }
}

TEST(ComplexSaddle, SolvesDerivativeEquation) {
  const auto q = catalog("quadratic", {2.0});
  const auto z = bdl::complex_saddle(q, {1.0, 0.6});
  ASSERT_TRUE(z.has_value());
  EXPECT_NEAR(std::abs(*z - std::complex<double>(0.5, 0.3)), 0.0, 1e-12);

  const auto p = catalog("quartic", {1.0, 0.25});
  const std::complex<double> xi(0.7, 0.2);
  const auto s = bdl::complex_saddle(p, xi);
  ASSERT_TRUE(s.has_value());
  EXPECT_NEAR(std::abs(p.derivative(*s) - xi), 0.0, 1e-12);

  EXPECT_FALSE(bdl::complex_saddle(catalog("smooth_bump", {1.0, 0.1}), {0.5, 0.1}).has_value());
}

}  // namespace
