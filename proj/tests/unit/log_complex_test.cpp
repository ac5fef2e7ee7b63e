#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "bdl/errors.hpp"
#include "bdl/log_complex.hpp"
#include "bdl/quadrature.hpp"

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

TEST(NormalizePhase, WrapsIntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(bdl::normalize_phase(kPi), kPi);
  EXPECT_DOUBLE_EQ(bdl::normalize_phase(-kPi), kPi);
  EXPECT_NEAR(bdl::normalize_phase(3.0 * kPi / 2.0), -kPi / 2.0, 1e-15);
  EXPECT_NEAR(bdl::normalize_phase(101.0), 101.0 - 32.0 * kPi, 1e-12);
  for (double t = -40.0; t <= 40.0; t += 0.37) {
    const double p = bdl::normalize_phase(t);
    EXPECT_GT(p, -kPi);
    EXPECT_LE(p, kPi);
    EXPECT_NEAR(std::remainder(p - t, 2.0 * kPi), 0.0, 1e-12);
  }
}

TEST(LogComplex, RoundTripsOrdinaryValues) {
  for (cd v : {cd(1, 0), cd(-2, 0), cd(0, 3), cd(-1e-200, 1e-200), cd(5e250, -5e250)}) {
    const auto l = bdl::LogComplex::from_complex(v);
    // exp(log_mag) turns the absolute rounding of log_mag into relative error.
    EXPECT_NEAR(std::abs(l.value() - v) / std::abs(v), 0.0, 4e-16 * (1.0 + std::abs(l.log_mag())));
  }
}

TEST(LogComplex, RejectsZeroAndNonFinite) {
  EXPECT_THROW(bdl::LogComplex::from_complex(0.0), bdl::InvalidArgument);
  EXPECT_THROW(bdl::LogComplex::from_complex(cd(NAN, 1.0)), bdl::InvalidArgument);
  EXPECT_THROW(bdl::LogComplex(INFINITY, 0.0), bdl::InvalidArgument);
}

TEST(LogComplex, ProductAndQuotientAddLogs) {
  const bdl::LogComplex a(1000.0, 3.0), b(2000.0, 1.0);
  const auto p = a * b;
  EXPECT_DOUBLE_EQ(p.log_mag(), 3000.0);
  EXPECT_NEAR(p.phase(), 4.0 - 2.0 * kPi, 1e-15);
  const auto q = a / b;
  EXPECT_DOUBLE_EQ(q.log_mag(), -1000.0);
  EXPECT_NEAR(q.phase(), 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(a.conj().phase(), -3.0);
}

TEST(LogComplex, SumOfHugeValuesStaysInRange) {
  // e^800 + e^800 i = sqrt(2) e^800 at phase pi/4.
  const auto s = bdl::LogComplex(800.0, 0.0) + bdl::LogComplex(800.0, kPi / 2.0);
  EXPECT_NEAR(s.log_mag(), 800.0 + 0.5 * std::log(2.0), 1e-12);
  EXPECT_NEAR(s.phase(), kPi / 4.0, 1e-15);
  EXPECT_TRUE(std::isinf(s.value().real()));
}

TEST(LogComplex, OppositeTermsCancelToRoundoff) {
  // sin(pi) is not 0 in double, so the residue is about 1.2e-16 of the terms.
  const auto s = bdl::LogComplex(5.0, 0.0) + bdl::LogComplex(5.0, kPi);
  EXPECT_LT(s.log_mag(), 5.0 - 35.0);
}

TEST(LogSumAccumulator, TracksScaleMassAndMaxTerm) {
  bdl::LogSumAccumulator acc;
  EXPECT_TRUE(acc.empty());
  EXPECT_FALSE(acc.result().has_value());
  acc.add(cd(700.0, 0.0));
  acc.add(cd(700.0, kPi));
  acc.add(cd(690.0, 0.0), 2.0);
  EXPECT_NEAR(acc.log_mag(), 690.0 + std::log(2.0), 1e-9);
  EXPECT_NEAR(acc.max_term_log_mag(), 700.0, 0.0);
  EXPECT_NEAR(acc.log_mass(), std::log(2.0 * std::exp(10.0) + 2.0) + 690.0, 1e-9);
  // Residue of the e^700 pair is ~1e-16 e^700, i.e. ~e^10 eps against the e^690 sum.
  EXPECT_NEAR(acc.result()->phase(), 0.0, 1e-11);
}

TEST(LogSumAccumulator, VanishingSumHasNoResult) {
  bdl::LogSumAccumulator acc;
  acc.add(cd(3.0, 0.0));
  acc.add(cd(3.0, 0.0), -1.0);
  EXPECT_EQ(acc.log_mag(), -INFINITY);
  EXPECT_FALSE(acc.result().has_value());
}

TEST(GaussLegendre, KnownFivePointRule) {
  const auto r = bdl::quad::gauss_legendre(5);
  ASSERT_EQ(r.nodes.size(), 5u);
  // Closed form: nodes 0, +-sqrt(5 -+ 2 sqrt(10/7)) / 3.
  EXPECT_NEAR(r.nodes[2], 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r.nodes[1]), std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0, 1e-15);
  EXPECT_NEAR(std::abs(r.nodes[0]), std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0, 1e-15);
  EXPECT_NEAR(r.weights[2], 128.0 / 225.0, 1e-15);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int n : {1, 2, 7, 20, 64}) {
    const auto r = bdl::quad::gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      const double exact = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
      EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " k=" << k;
    }
  }
  EXPECT_THROW(bdl::quad::gauss_legendre(0), bdl::InvalidArgument);
}

TEST(GaussLegendre, CompositeRuleIntegratesExponential) {
  const auto c = bdl::quad::composite(-1.0, 2.0, 3);
  EXPECT_EQ(c.nodes.size(), 60u);
  double s = 0.0;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) s += c.weights[i] * std::exp(c.nodes[i]);
  EXPECT_NEAR(s, std::exp(2.0) - std::exp(-1.0), 1e-13);
}

}  // namespace
