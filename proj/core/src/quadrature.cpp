#include "bdl/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "bdl/errors.hpp"

namespace bdl::quad {

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

const GaussLegendreRule& default_rule() {
  static const GaussLegendreRule rule = gauss_legendre(20);
  return rule;
}

CompositeRule composite(double a, double b, int panels, const GaussLegendreRule& rule) {
  if (panels < 1) throw InvalidArgument("composite: panels must be positive");
  CompositeRule out;
  const std::size_t m = rule.nodes.size();
  out.nodes.reserve(m * panels);
  out.weights.reserve(m * panels);
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double left = a + p * width;
    const double mid = left + 0.5 * width;
    for (std::size_t k = 0; k < m; ++k) {
      out.nodes.push_back(mid + 0.5 * width * rule.nodes[k]);
      out.weights.push_back(0.5 * width * rule.weights[k]);
    }
  }
  return out;
}

}  // namespace bdl::quad
