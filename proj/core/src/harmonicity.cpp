#include <cmath>

#include "bdl/errors.hpp"
#include "bdl/scriptf.hpp"
#include "bdl/zeroscan.hpp"

namespace bdl {

double harmonicity_defect(const std::function<double(std::complex<double>)>& f, const ComplexBox& box, double h) {
  if (!(h > 0.0)) throw InvalidArgument("harmonicity_defect: step must be positive");
  const int nx = static_cast<int>(std::floor((box.re_hi - box.re_lo) / h + 1e-9));
  const int ny = static_cast<int>(std::floor((box.im_hi - box.im_lo) / h + 1e-9));
  if (nx < 2 || ny < 2) throw InvalidArgument("harmonicity_defect: box holds no interior grid node");

  // Grid values are computed once; row-major in the real direction.
  std::vector<double> v(static_cast<std::size_t>(nx + 1) * (ny + 1));
  auto at = [&](int i, int j) -> double& { return v[static_cast<std::size_t>(j) * (nx + 1) + i]; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) at(i, j) = f({box.re_lo + i * h, box.im_lo + j * h});
  }
  double worst = 0.0;
  for (int j = 1; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const double lap = (at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - 4.0 * at(i, j)) / (h * h);
      worst = std::max(worst, std::abs(lap));
    }
  }
  return worst;
}

double harmonicity_defect(const ConvexPotential& p, const ComplexBox& box, double lambda, double h,
                          const QuadratureOptions& options) {
  if (p.dimension() != 1) throw InvalidArgument("harmonicity_defect: one-dimensional potential required");
  const int w = winding_number(scriptF_log_jet(p, lambda, options), box);
  if (w != 0) {
    throw InvalidArgument("harmonicity_defect: box encloses " + std::to_string(w) +
                          " zero(s) of F; locate them with find_zeros and shrink the box");
  }
  return harmonicity_defect(
      [&](std::complex<double> xi) { return log_scriptF(p, xi, lambda, options).logF.log_mag(); }, box, h);
}

}  // namespace bdl
