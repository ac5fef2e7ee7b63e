#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bdl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Axis-aligned box in R^d.
struct Box {
  Vector lower;
  Vector upper;

  static Box cube(int dimension, double lo, double hi);
  int dimension() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& x) const;
};

enum class Analyticity { analytic, smooth_only, unknown };

std::string_view to_string(Analyticity a);

/// Bounds c_low I <= Hess phi <= c_high I. When `global_upper` is false the upper bound
/// only holds on the potential's declared box (the family grows faster than quadratic).
struct ConvexityBounds {
  double low = 0.0;
  double high = 0.0;
  bool global_upper = true;
};

/// Affine shift subtracted at construction so that phi(0) = 0 and grad phi(0) = 0.
struct Normalization {
  double value_shift = 0.0;
  Vector gradient_shift;
};

/// A raw (un-normalized) smooth function on R^d. Families with an entire extension
/// override the complex overloads and report `has_complex_extension()`.
class PotentialModel {
 public:
  virtual ~PotentialModel() = default;

  virtual int dimension() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual Matrix hessian(const Vector& x) const = 0;

  virtual bool has_complex_extension() const { return false; }
  virtual std::complex<double> value(const CVector& z) const;
  virtual CVector gradient(const CVector& z) const;
  virtual CMatrix hessian(const CVector& z) const;
  /// Largest |Im z| (per coordinate) for which Re phi(x + i y) -> +inf as |x| -> inf
  /// uniformly, i.e. horizontal integration contours inside this strip are admissible.
  virtual double contour_strip_half_width() const;
};

/// Convex potential phi: R^d -> R, normalized so phi(0) = 0 and grad phi(0) = 0.
///
/// Immutable value type; copies share the underlying model.
class ConvexPotential {
 public:
  struct Metadata {
    std::string family = "custom";
    std::vector<double> params;
    Analyticity analyticity = Analyticity::unknown;
    ConvexityBounds bounds;
    /// Region on which the upper convexity bound was established (box-only families).
    std::optional<Box> declared_box;
  };

  ConvexPotential(std::shared_ptr<const PotentialModel> model, Metadata metadata);

  int dimension() const { return dimension_; }
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;

  bool has_complex_extension() const { return model_->has_complex_extension(); }
  std::complex<double> value(const CVector& z) const;
  CVector gradient(const CVector& z) const;
  CMatrix hessian(const CVector& z) const;
  double contour_strip_half_width() const { return model_->contour_strip_half_width(); }

  // One-dimensional conveniences; throw InvalidArgument when dimension() != 1.
  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  std::complex<double> value(std::complex<double> z) const;
  std::complex<double> derivative(std::complex<double> z) const;
  std::complex<double> second_derivative(std::complex<double> z) const;

  const std::string& family() const { return meta_.family; }
  const std::vector<double>& params() const { return meta_.params; }
  Analyticity analyticity() const { return meta_.analyticity; }
  const ConvexityBounds& convexity_bounds() const { return meta_.bounds; }
  const std::optional<Box>& declared_box() const { return meta_.declared_box; }
  const Normalization& normalization() const { return normalization_; }
  /// `family:p1,p2,...`, parseable by parse_potential.
  std::string spec() const;

 private:
  void require_1d(const char* what) const;

  std::shared_ptr<const PotentialModel> model_;
  Metadata meta_;
  Normalization normalization_;
  int dimension_;
};

/// Builds a catalog potential. Families (d = 1 unless noted):
///   quadratic      [q1, ..., qd]     phi = sum q_j x_j^2 / 2, q_j > 0 (any d <= 3)
///   quartic        [alpha, beta]     alpha x^2/2 + beta x^4, alpha > 0, beta >= 0
///                                    (quartic:1,0.25 is x^2/2 + x^4/4)
///   cosh           []                cosh(x) - 1 (no global upper bound; declared box [-10,10])
///   analytic_trig  [alpha, eps, w]   alpha x^2/2 + eps (1 - cos(w x)), alpha > |eps| w^2
///   smooth_bump    [alpha, eps]      alpha x^2/2 + eps B(x), B(x) = exp(-1/(1-x^2)) on (-1,1),
///                                    alpha > |eps| max|B''| (C-infinity, not analytic)
/// Throws InvalidArgument for unknown names or parameters that break convexity.
ConvexPotential catalog(std::string_view name, std::span<const double> params);
ConvexPotential catalog(std::string_view name, std::initializer_list<double> params);

/// Parses `family:p1,p2,...` (parameters optional, e.g. `cosh`).
ConvexPotential parse_potential(std::string_view spec);

/// Extremes of B'' for the smooth_bump family.
inline constexpr double kBumpSecondDerivativeMin = -1.5299794768988423965;
inline constexpr double kBumpSecondDerivativeMax = 7.7497049416941454347;

struct ValidationReport {
  Box grid_box;
  int grid_points = 0;
  double min_eig = 0.0;
  double max_eig = 0.0;
  double worst_fd_gradient_error = 0.0;
  double worst_fd_hessian_error = 0.0;
  double worst_symmetry_error = 0.0;
  bool passed = false;
};

/// Tolerances of the validation sweep.
inline constexpr double kFiniteDifferenceTolerance = 1e-6;
inline constexpr double kSymmetryTolerance = 1e-12;

/// Sweeps a tensor grid of n points per axis over `box`: Hessian eigenvalue range and
/// central finite-difference consistency of gradient and Hessian (step 1e-5 (1 + |x|)).
/// Failures are reported, never thrown, except for a malformed box or n < 2.
ValidationReport validate(const ConvexPotential& p, const Box& box, int n);

}  // namespace bdl
