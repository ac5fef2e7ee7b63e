#pragma once

#include <vector>

namespace bdl::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computes the n-point rule by Newton iteration on P_n (n >= 1).
GaussLegendreRule gauss_legendre(int n);

/// The 20-point rule used by the composite integrators. Computed once.
const GaussLegendreRule& default_rule();

/// Composite rule: `panels` equal panels on [a, b], each carrying `rule`.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

CompositeRule composite(double a, double b, int panels, const GaussLegendreRule& rule = default_rule());

}  // namespace bdl::quad
