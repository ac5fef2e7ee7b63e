#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "bdl/errors.hpp"
#include "bdl/legendre.hpp"
#include "bdl/zeroscan.hpp"

namespace {

using bdl::catalog;
using cd = std::complex<double>;

bdl::LogJetFn cubic_with_roots(cd a, cd b, cd c) {
  return bdl::log_jet_of([=](cd z) { return (z - a) * (z - b) * (z - c); },
                         [=](cd z) { return (z - b) * (z - c) + (z - a) * (z - c) + (z - a) * (z - b); });
}

double nearest(const bdl::ZeroCertificate& cert, cd target) {
  double best = INFINITY;
  for (const auto& r : cert.roots) best = std::min(best, std::abs(r.xi - target));
  return best;
}

TEST(Winding, CountsPolynomialRoots) {
  const auto f = cubic_with_roots({0.2, 0.1}, {-0.3, -0.4}, {2.0, 2.0});
  EXPECT_EQ(bdl::winding_number(f, {-1.0, 1.0, -1.0, 1.0}), 2);
  EXPECT_EQ(bdl::winding_number(f, {0.0, 1.0, 0.0, 1.0}), 1);
  EXPECT_EQ(bdl::winding_number(f, {0.5, 1.0, -1.0, 1.0}), 0);
  EXPECT_EQ(bdl::winding_number(f, {-3.0, 3.0, -3.0, 3.0}), 3);
}

TEST(Winding, AdditiveOverSubdivision) {
  const auto f = cubic_with_roots({0.21, 0.13}, {-0.33, -0.41}, {0.77, -0.52});
  const bdl::ComplexBox whole{-1.0, 1.0, -1.0, 1.0};
  int sum = 0;
  for (double x0 : {-1.0, 0.05}) {
    for (double y0 : {-1.0, -0.03}) {
      sum += bdl::winding_number(f, {x0, x0 < 0.0 ? 0.05 : 1.0, y0, y0 < -0.5 ? -0.03 : 1.0});
    }
  }
  EXPECT_EQ(sum, bdl::winding_number(f, whole));
  EXPECT_EQ(sum, 3);
}

TEST(Winding, HighOrderZeroNeedsRefinementButResolves) {
  // z^12 winds 12 times; 32 samples per side alias without the derivative check.
  const auto f = bdl::log_jet_of([](cd z) { return std::pow(z, 12); }, [](cd z) { return 12.0 * std::pow(z, 11); });
  EXPECT_EQ(bdl::winding_number(f, {-0.5, 0.5, -0.5, 0.5}), 12);
}

TEST(Winding, ZeroOnBoundaryIsReported) {
  const auto f = bdl::log_jet_of([](cd z) { return z - 0.5; }, [](cd) { return cd(1.0); });
  EXPECT_THROW(bdl::winding_number(f, {-0.5, 0.5, -0.5, 0.5}), bdl::BoundaryZeroError);
  EXPECT_THROW(bdl::winding_number(f, {0.0, 0.0, -0.5, 0.5}), bdl::InvalidArgument);
}

TEST(FindZeros, PolynomialRootsAndCertificateInvariants) {
  const cd a(0.2, 0.1), b(-0.3, -0.4), c(0.6, 0.55);
  const auto cert = bdl::find_zeros(cubic_with_roots(a, b, c), {-1.0, 1.0, -1.0, 1.0});
  EXPECT_TRUE(cert.complete);
  EXPECT_EQ(cert.winding, 3);
  ASSERT_EQ(cert.roots.size(), 3u);
  for (cd r : {a, b, c}) EXPECT_LE(nearest(cert, r), 1e-12);
  for (const auto& r : cert.roots) {
    EXPECT_EQ(r.multiplicity, 1);
    EXPECT_LE(r.residual_log_mag, cert.boundary_median_log_mag - 30.0);
  }
}

TEST(FindZeros, DoubleRootReportedAsCluster) {
  const cd r(0.123, -0.077);
  const auto f = bdl::log_jet_of([=](cd z) { return (z - r) * (z - r); }, [=](cd z) { return 2.0 * (z - r); });
  bdl::ZeroScanOptions opt;
  opt.max_depth = 6;
  const auto cert = bdl::find_zeros(f, {-1.0, 1.0, -1.0, 1.0}, opt);
  EXPECT_EQ(cert.winding, 2);
  int total = 0;
  for (const auto& z : cert.roots) total += z.multiplicity;
  EXPECT_EQ(total, 2);
  EXPECT_LE(nearest(cert, r), 0.05);
}

TEST(FindZeros, GaussianScriptFIsZeroFree) {
  const auto p = catalog("quadratic", {1.0});
  for (double lambda : {20.0, 100.0}) {
    const auto cert = bdl::find_zeros(p, lambda, {-1.0, 1.0, -0.5, 0.5});
    EXPECT_EQ(cert.winding, 0) << lambda;
    EXPECT_TRUE(cert.roots.empty());
    EXPECT_TRUE(cert.complete);
    EXPECT_EQ(cert.lambda, lambda);
  }
}

TEST(FindZeros, InjectedRootRecovered) {
  const cd root(0.1, 0.05);
  const auto f = bdl::with_injected_root(bdl::scriptF_log_jet(catalog("quadratic", {1.0}), 20.0), root);
  const auto cert = bdl::find_zeros(f, {-1.0, 1.0, -0.5, 0.5});
  EXPECT_EQ(cert.winding, 1);
  ASSERT_EQ(cert.roots.size(), 1u);
  EXPECT_LE(std::abs(cert.roots[0].xi - root), 1e-8);
}

// Roots of F for analytic_trig[1, 0.025, 6] at lambda = 40 from an independent mpmath
// argument-principle scan (tests/oracles/zeros_oracle.py). All lie on Re xi = pi / 6.
TEST(FindZeros, TrigPotentialRootsMatchOracle) {
  const auto cert = bdl::find_zeros(catalog("analytic_trig", {1.0, 0.025, 6.0}), 40.0, {0.3, 0.7, 0.6, 0.9});
  EXPECT_TRUE(cert.complete);
  EXPECT_EQ(cert.winding, 3);
  ASSERT_EQ(cert.roots.size(), 3u);
  const double re = std::numbers::pi / 6.0;
  for (double im : {0.62905428470039626, 0.72938003797038361, 0.82650528818953199}) {
    EXPECT_LE(nearest(cert, {re, im}), 1e-8) << "im=" << im;
  }
  for (const auto& r : cert.roots) EXPECT_LE(r.residual_log_mag, cert.boundary_median_log_mag - 30.0);
}

TEST(Deficiency, GaussianClosedForm) {
  const auto p = catalog("quadratic", {1.0});
  const bdl::ComplexBox region{-0.5, 0.5, -0.2, 0.2};
  const std::vector<double> lambdas{50.0, 200.0, 800.0};
  const auto rep = bdl::resonance_deficiency(p, lambdas, region, 9);
  ASSERT_EQ(rep.trend.size(), 3u);
  for (const auto& e : rep.trend) {
    const double expect = -0.02 + std::log(std::numbers::pi / e.lambda) / (4.0 * e.lambda);
    EXPECT_NEAR(e.min_deficiency, expect, 1e-8) << e.lambda;
    EXPECT_NEAR(std::abs(e.argmin_xi.imag()), 0.2, 1e-15);
  }
  EXPECT_EQ(rep.lambda, 800.0);
  EXPECT_NEAR(std::abs(rep.im_at_argmin), 0.2, 1e-15);
}

TEST(Deficiency, BoundedBelowForAnalyticFamilies) {
  const bdl::ComplexBox region{-0.5, 0.5, -0.2, 0.2};
  for (const auto& p : {catalog("quartic", {1.0, 0.25}), catalog("analytic_trig", {1.0, 0.025, 6.0})}) {
    const double c_high = p.convexity_bounds().high;
    const auto rep = bdl::resonance_deficiency(p, {10.0, 100.0, 1000.0}, region, 8);
    for (const auto& e : rep.trend) {
      EXPECT_GE(e.min_deficiency, -0.04 * c_high / 2.0 - 0.1) << p.spec() << " lambda=" << e.lambda;
    }
  }
}

TEST(Deficiency, MinimumIsBelowEveryProbedPoint) {
  const auto p = catalog("quartic", {1.0, 0.25});
  const bdl::ComplexBox region{-0.4, 0.4, -0.1, 0.1};
  const double lambda = 60.0;
  const auto rep = bdl::resonance_deficiency(p, {lambda}, region, 8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const cd xi(-0.4 + 0.8 * i / 7.0, -0.1 + 0.2 * j / 7.0);
      const double d = bdl::normalized_log(p, xi, lambda) - bdl::u_limit(p, xi.real());
      EXPECT_LE(rep.min_deficiency, d + 1e-12);
    }
  }
}

TEST(Deficiency, RealAxisDeficiencyDecaysLikeLogLambdaOverLambda) {
  const auto p = catalog("quartic", {1.0, 0.25});
  std::vector<double> scaled;
  for (double lambda : {50.0, 100.0, 200.0, 400.0, 800.0}) {
    const double d = bdl::normalized_log(p, cd(0.5, 0.0), lambda) - bdl::u_limit(p, 0.5);
    scaled.push_back(std::abs(d) * lambda / std::log(lambda));
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  EXPECT_LE(*hi / *lo, 1.5);
}

TEST(Deficiency, RejectsBadInput) {
  const auto p = catalog("quadratic", {1.0});
  EXPECT_THROW(bdl::resonance_deficiency(p, {10.0}, {-1.0, 1.0, 0.0, 0.1}, 4), bdl::InvalidArgument);
  EXPECT_THROW(bdl::resonance_deficiency(p, {}, {-1.0, 1.0, 0.0, 0.1}, 8), bdl::InvalidArgument);
}

}  // namespace
