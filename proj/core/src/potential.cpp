#include "bdl/potential.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "bdl/errors.hpp"

namespace bdl {

Box Box::cube(int dimension, double lo, double hi) {
  return {Vector::Constant(dimension, lo), Vector::Constant(dimension, hi)};
}

bool Box::contains(const Vector& x) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  }
  return true;
}

std::string_view to_string(Analyticity a) {
  switch (a) {
    case Analyticity::analytic: return "analytic";
    case Analyticity::smooth_only: return "smooth-only";
    case Analyticity::unknown: return "unknown";
  }
  return "unknown";
}

std::complex<double> PotentialModel::value(const CVector&) const {
  throw InvalidArgument("potential has no complex extension");
}
CVector PotentialModel::gradient(const CVector&) const {
  throw InvalidArgument("potential has no complex extension");
}
CMatrix PotentialModel::hessian(const CVector&) const {
  throw InvalidArgument("potential has no complex extension");
}
double PotentialModel::contour_strip_half_width() const {
  return has_complex_extension() ? std::numeric_limits<double>::infinity() : 0.0;
}

namespace {

// One-dimensional entire families: value and two derivatives, generic in the scalar type.
template <class Family>
class Entire1D final : public PotentialModel {
 public:
  explicit Entire1D(Family family) : f_(family) {}

  int dimension() const override { return 1; }
  double value(const Vector& x) const override { return f_.value(x[0]); }
  Vector gradient(const Vector& x) const override { return Vector::Constant(1, f_.d1(x[0])); }
  Matrix hessian(const Vector& x) const override { return Matrix::Constant(1, 1, f_.d2(x[0])); }

  bool has_complex_extension() const override { return true; }
  std::complex<double> value(const CVector& z) const override { return f_.value(z[0]); }
  CVector gradient(const CVector& z) const override { return CVector::Constant(1, f_.d1(z[0])); }
  CMatrix hessian(const CVector& z) const override { return CMatrix::Constant(1, 1, f_.d2(z[0])); }
  double contour_strip_half_width() const override { return f_.strip(); }

 private:
  Family f_;
};

struct QuarticFamily {
  double alpha, beta;
  template <class T> T value(T x) const { return alpha * x * x / 2.0 + beta * x * x * x * x; }
  template <class T> T d1(T x) const { return alpha * x + 4.0 * beta * x * x * x; }
  template <class T> T d2(T x) const { return alpha + 12.0 * beta * x * x; }
  double strip() const { return std::numeric_limits<double>::infinity(); }
};

struct CoshFamily {
  template <class T> T value(T x) const { return std::cosh(x) - 1.0; }
  template <class T> T d1(T x) const { return std::sinh(x); }
  template <class T> T d2(T x) const { return std::cosh(x); }
  // Re cosh(x + iy) = cosh(x) cos(y) grows only while |y| < pi/2.
  double strip() const { return std::numbers::pi / 2.0; }
};

struct TrigFamily {
  double alpha, eps, omega;
  template <class T> T value(T x) const { return alpha * x * x / 2.0 + eps * (1.0 - std::cos(omega * x)); }
  template <class T> T d1(T x) const { return alpha * x + eps * omega * std::sin(omega * x); }
  template <class T> T d2(T x) const { return alpha + eps * omega * omega * std::cos(omega * x); }
  double strip() const { return std::numeric_limits<double>::infinity(); }
};

class QuadraticModel final : public PotentialModel {
 public:
  explicit QuadraticModel(Vector q) : q_(std::move(q)) {}

  int dimension() const override { return static_cast<int>(q_.size()); }
  double value(const Vector& x) const override { return 0.5 * (q_.array() * x.array().square()).sum(); }
  Vector gradient(const Vector& x) const override { return q_.cwiseProduct(x); }
  Matrix hessian(const Vector&) const override { return q_.asDiagonal(); }

  bool has_complex_extension() const override { return true; }
  std::complex<double> value(const CVector& z) const override {
    return 0.5 * (q_.cast<std::complex<double>>().array() * z.array().square()).sum();
  }
  CVector gradient(const CVector& z) const override {
    return q_.cast<std::complex<double>>().cwiseProduct(z);
  }
  CMatrix hessian(const CVector&) const override {
    return q_.cast<std::complex<double>>().asDiagonal();
  }

 private:
  Vector q_;
};

// Standard C-infinity bump exp(-1/(1-x^2)) supported on (-1, 1).
struct Bump {
  static double value(double x) {
    const double s = 1.0 - x * x;
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
  }
  static double d1(double x) {
    const double s = 1.0 - x * x;
    return s > 0.0 ? std::exp(-1.0 / s) * (-2.0 * x / (s * s)) : 0.0;
  }
  static double d2(double x) {
    const double s = 1.0 - x * x;
    if (s <= 0.0) return 0.0;
    const double e = std::exp(-1.0 / s);
    return e == 0.0 ? 0.0 : e * (6.0 * x * x * x * x - 2.0) / (s * s * s * s);
  }
};

class SmoothBumpModel final : public PotentialModel {
 public:
  SmoothBumpModel(double alpha, double eps) : alpha_(alpha), eps_(eps) {}

  int dimension() const override { return 1; }
  double value(const Vector& x) const override {
    return alpha_ * x[0] * x[0] / 2.0 + eps_ * Bump::value(x[0]);
  }
  Vector gradient(const Vector& x) const override {
    return Vector::Constant(1, alpha_ * x[0] + eps_ * Bump::d1(x[0]));
  }
  Matrix hessian(const Vector& x) const override {
    return Matrix::Constant(1, 1, alpha_ + eps_ * Bump::d2(x[0]));
  }

 private:
  double alpha_, eps_;
};

void expect_params(std::string_view name, std::span<const double> params, std::size_t n) {
  if (params.size() != n) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "catalog(%.*s): expected %zu parameters, got %zu",
                  static_cast<int>(name.size()), name.data(), n, params.size());
    throw InvalidArgument(buf);
  }
  for (double v : params) {
    if (!std::isfinite(v)) throw InvalidArgument("catalog: parameters must be finite");
  }
}

[[noreturn]] void reject_convexity(std::string_view name, double bound) {
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "catalog(%.*s): parameters violate strict convexity, Hessian lower bound %.6g <= 0",
                static_cast<int>(name.size()), name.data(), bound);
  throw InvalidArgument(buf);
}

}  // namespace

ConvexPotential::ConvexPotential(std::shared_ptr<const PotentialModel> model, Metadata metadata)
    : model_(std::move(model)), meta_(std::move(metadata)) {
  if (!model_) throw InvalidArgument("ConvexPotential: null model");
  dimension_ = model_->dimension();
  if (dimension_ < 1) throw InvalidArgument("ConvexPotential: dimension must be positive");
  const Vector zero = Vector::Zero(dimension_);
  normalization_.value_shift = model_->value(zero);
  normalization_.gradient_shift = model_->gradient(zero);
}

void ConvexPotential::require_1d(const char* what) const {
  if (dimension_ != 1) {
    throw InvalidArgument(std::string(what) + ": one-dimensional potential required");
  }
}

double ConvexPotential::value(const Vector& x) const {
  return model_->value(x) - normalization_.value_shift - normalization_.gradient_shift.dot(x);
}

Vector ConvexPotential::gradient(const Vector& x) const {
  return model_->gradient(x) - normalization_.gradient_shift;
}

Matrix ConvexPotential::hessian(const Vector& x) const { return model_->hessian(x); }

std::complex<double> ConvexPotential::value(const CVector& z) const {
  return model_->value(z) - normalization_.value_shift -
         (normalization_.gradient_shift.cast<std::complex<double>>().transpose() * z)(0);
}

CVector ConvexPotential::gradient(const CVector& z) const {
  return model_->gradient(z) - normalization_.gradient_shift.cast<std::complex<double>>();
}

CMatrix ConvexPotential::hessian(const CVector& z) const { return model_->hessian(z); }

double ConvexPotential::value(double x) const {
  require_1d("value");
  return value(Vector(Vector::Constant(1, x)));
}
double ConvexPotential::derivative(double x) const {
  require_1d("derivative");
  return gradient(Vector(Vector::Constant(1, x)))[0];
}
double ConvexPotential::second_derivative(double x) const {
  require_1d("second_derivative");
  return hessian(Vector(Vector::Constant(1, x)))(0, 0);
}
std::complex<double> ConvexPotential::value(std::complex<double> z) const {
  require_1d("value");
  return value(CVector(CVector::Constant(1, z)));
}
std::complex<double> ConvexPotential::derivative(std::complex<double> z) const {
  require_1d("derivative");
  return gradient(CVector(CVector::Constant(1, z)))[0];
}
std::complex<double> ConvexPotential::second_derivative(std::complex<double> z) const {
  require_1d("second_derivative");
  return hessian(CVector(CVector::Constant(1, z)))(0, 0);
}

std::string ConvexPotential::spec() const {
  std::string out = meta_.family;
  for (std::size_t i = 0; i < meta_.params.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", meta_.params[i]);
    out += (i == 0 ? ":" : ",");
    out += buf;
  }
  return out;
}

ConvexPotential catalog(std::string_view name, std::span<const double> params) {
  using Meta = ConvexPotential::Metadata;
  Meta meta;
  meta.family = std::string(name);
  meta.params.assign(params.begin(), params.end());

  if (name == "quadratic") {
    if (params.empty() || params.size() > 3) {
      throw InvalidArgument("catalog(quadratic): need between one and three coefficients");
    }
    Vector q(static_cast<Eigen::Index>(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!std::isfinite(params[i])) throw InvalidArgument("catalog: parameters must be finite");
      q[static_cast<Eigen::Index>(i)] = params[i];
    }
    if (q.minCoeff() <= 0.0) reject_convexity(name, q.minCoeff());
    meta.analyticity = Analyticity::analytic;
    meta.bounds = {q.minCoeff(), q.maxCoeff(), true};
    return ConvexPotential(std::make_shared<QuadraticModel>(q), std::move(meta));
  }
  if (name == "quartic") {
    expect_params(name, params, 2);
    const double alpha = params[0], beta = params[1];
    if (alpha <= 0.0) reject_convexity(name, alpha);
    if (beta < 0.0) throw InvalidArgument("catalog(quartic): beta must be nonnegative");
    meta.analyticity = Analyticity::analytic;
    meta.declared_box = Box::cube(1, -10.0, 10.0);
    meta.bounds = {alpha, alpha + 1200.0 * beta, beta == 0.0};
    return ConvexPotential(std::make_shared<Entire1D<QuarticFamily>>(QuarticFamily{alpha, beta}),
                           std::move(meta));
  }
  if (name == "cosh") {
    expect_params(name, params, 0);
    meta.analyticity = Analyticity::analytic;
    meta.declared_box = Box::cube(1, -10.0, 10.0);
    meta.bounds = {1.0, std::cosh(10.0), false};
    return ConvexPotential(std::make_shared<Entire1D<CoshFamily>>(CoshFamily{}), std::move(meta));
  }
  if (name == "analytic_trig") {
    expect_params(name, params, 3);
    const double alpha = params[0], eps = params[1], omega = params[2];
    const double swing = std::abs(eps) * omega * omega;
    if (alpha - swing <= 0.0) reject_convexity(name, alpha - swing);
    meta.analyticity = Analyticity::analytic;
    meta.bounds = {alpha - swing, alpha + swing, true};
    return ConvexPotential(
        std::make_shared<Entire1D<TrigFamily>>(TrigFamily{alpha, eps, omega}), std::move(meta));
  }
  if (name == "smooth_bump") {
    expect_params(name, params, 2);
    const double alpha = params[0], eps = params[1];
    const double max_abs = std::max(-kBumpSecondDerivativeMin, kBumpSecondDerivativeMax);
    if (alpha - std::abs(eps) * max_abs <= 0.0) reject_convexity(name, alpha - std::abs(eps) * max_abs);
    const double lo = eps >= 0.0 ? alpha + eps * kBumpSecondDerivativeMin : alpha + eps * kBumpSecondDerivativeMax;
    const double hi = eps >= 0.0 ? alpha + eps * kBumpSecondDerivativeMax : alpha + eps * kBumpSecondDerivativeMin;
    meta.analyticity = Analyticity::smooth_only;
    meta.bounds = {lo, hi, true};
    return ConvexPotential(std::make_shared<SmoothBumpModel>(alpha, eps), std::move(meta));
  }
  throw InvalidArgument("catalog: unknown potential family '" + std::string(name) + "'");
}

ConvexPotential catalog(std::string_view name, std::initializer_list<double> params) {
  return catalog(name, std::span<const double>(params.begin(), params.size()));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

ConvexPotential parse_potential(std::string_view spec) {
  spec = trim(spec);
  const auto colon = spec.find(':');
  const std::string_view name = trim(spec.substr(0, colon));
  std::vector<double> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view token = trim(rest.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
        throw InvalidArgument("parse_potential: bad parameter '" + std::string(token) + "' in '" +
                              std::string(spec) + "'");
      }
      params.push_back(v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  return catalog(name, params);
}

ValidationReport validate(const ConvexPotential& p, const Box& box, int n) {
  const int d = p.dimension();
  if (box.dimension() != d) throw InvalidArgument("validate: box dimension mismatch");
  if (n < 2) throw InvalidArgument("validate: need at least 2 grid points per axis");
  for (int i = 0; i < d; ++i) {
    if (!(box.upper[i] > box.lower[i])) throw InvalidArgument("validate: degenerate box");
  }

  ValidationReport report;
  report.grid_box = box;
  report.grid_points = n;
  report.min_eig = std::numeric_limits<double>::infinity();
  report.max_eig = -std::numeric_limits<double>::infinity();

  long total = 1;
  for (int i = 0; i < d; ++i) total *= n;
  std::vector<int> idx(d, 0);
  Vector x(d);
  for (long k = 0; k < total; ++k) {
    long rem = k;
    for (int i = 0; i < d; ++i) {
      idx[i] = static_cast<int>(rem % n);
      rem /= n;
      x[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * idx[i] / (n - 1);
    }
    const Matrix h = p.hessian(x);
    report.worst_symmetry_error = std::max(report.worst_symmetry_error, (h - h.transpose()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (h + h.transpose()), Eigen::EigenvaluesOnly);
    report.min_eig = std::min(report.min_eig, eig.eigenvalues().minCoeff());
    report.max_eig = std::max(report.max_eig, eig.eigenvalues().maxCoeff());

    const double step = 1e-5 * (1.0 + x.norm());
    const Vector g = p.gradient(x);
    Vector fd_g(d);
    Matrix fd_h(d, d);
    for (int j = 0; j < d; ++j) {
      Vector xp = x, xm = x;
      xp[j] += step;
      xm[j] -= step;
      fd_g[j] = (p.value(xp) - p.value(xm)) / (2.0 * step);
      fd_h.col(j) = (p.gradient(xp) - p.gradient(xm)) / (2.0 * step);
    }
    const double g_err = (g - fd_g).cwiseAbs().maxCoeff() / std::max(1.0, g.cwiseAbs().maxCoeff());
    const double h_err = (h - fd_h).cwiseAbs().maxCoeff() / std::max(1.0, h.cwiseAbs().maxCoeff());
    report.worst_fd_gradient_error = std::max(report.worst_fd_gradient_error, g_err);
    report.worst_fd_hessian_error = std::max(report.worst_fd_hessian_error, h_err);
  }
  report.passed = report.min_eig > 0.0 && report.worst_fd_gradient_error <= kFiniteDifferenceTolerance &&
                  report.worst_fd_hessian_error <= kFiniteDifferenceTolerance &&
                  report.worst_symmetry_error <= kSymmetryTolerance;
  return report;
}

}  // namespace bdl
