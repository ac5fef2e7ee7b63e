#include "bdl/log_complex.hpp"

#include <cmath>
#include <numbers>

#include "bdl/errors.hpp"

namespace bdl {

double normalize_phase(double phase) {
  if (!std::isfinite(phase)) throw InvalidArgument("normalize_phase: non-finite phase");
  double wrapped = std::remainder(phase, 2.0 * std::numbers::pi);
  if (wrapped <= -std::numbers::pi) wrapped += 2.0 * std::numbers::pi;
  return wrapped;
}

LogComplex::LogComplex(double log_mag, double phase)
    : log_mag_(log_mag), phase_(normalize_phase(phase)) {
  if (!std::isfinite(log_mag)) throw InvalidArgument("LogComplex: log magnitude must be finite");
}

LogComplex LogComplex::from_complex(std::complex<double> value) {
  const double mag = std::abs(value);
  if (!(mag > 0.0) || !std::isfinite(mag)) {
    throw InvalidArgument("LogComplex::from_complex: value must be finite and nonzero");
  }
  return {std::log(mag), std::arg(value)};
}

LogComplex LogComplex::from_log(std::complex<double> log_value) {
  return {log_value.real(), log_value.imag()};
}

std::complex<double> LogComplex::value() const {
  return std::polar(std::exp(log_mag_), phase_);
}

LogComplex LogComplex::operator*(const LogComplex& other) const {
  return {log_mag_ + other.log_mag_, phase_ + other.phase_};
}

LogComplex LogComplex::operator/(const LogComplex& other) const {
  return {log_mag_ - other.log_mag_, phase_ - other.phase_};
}

LogComplex LogComplex::operator+(const LogComplex& other) const {
  const LogComplex& big = log_mag_ >= other.log_mag_ ? *this : other;
  const LogComplex& small = log_mag_ >= other.log_mag_ ? other : *this;
  const std::complex<double> ratio =
      std::polar(std::exp(small.log_mag_ - big.log_mag_), small.phase_ - big.phase_);
  const std::complex<double> s = 1.0 + ratio;
  const double mag = std::abs(s);
  if (mag == 0.0) {
    throw MagnitudeUnderflow("LogComplex: exact cancellation in sum", -INFINITY, big.log_mag_);
  }
  return {big.log_mag_ + std::log(mag), big.phase_ + std::arg(s)};
}

void LogSumAccumulator::add(std::complex<double> log_term) { add(log_term, {1.0, 0.0}); }

void LogSumAccumulator::add(std::complex<double> log_term, std::complex<double> factor) {
  const double fmag = std::abs(factor);
  if (fmag == 0.0) return;
  const double re = log_term.real();
  if (re == -INFINITY) return;
  if (!std::isfinite(re) || !std::isfinite(log_term.imag()) || !std::isfinite(fmag)) {
    throw InvalidArgument("LogSumAccumulator: non-finite term");
  }
  const double term_log = re + std::log(fmag);
  if (term_log > max_term_) max_term_ = term_log;
  if (re > scale_) {
    const double shrink = std::exp(scale_ - re);
    sum_ *= shrink;
    mass_ *= shrink;
    scale_ = re;
  }
  const double rel = std::exp(re - scale_);
  sum_ += factor * std::polar(rel, log_term.imag());
  mass_ += fmag * rel;
}

double LogSumAccumulator::log_mag() const {
  if (empty()) return -INFINITY;
  const double mag = std::abs(sum_);
  return mag == 0.0 ? -INFINITY : scale_ + std::log(mag);
}

std::optional<LogComplex> LogSumAccumulator::result() const {
  if (empty() || std::abs(sum_) == 0.0) return std::nullopt;
  return LogComplex(scale_ + std::log(std::abs(sum_)), std::arg(sum_));
}

double LogSumAccumulator::log_mass() const {
  if (empty() || mass_ == 0.0) return -INFINITY;
  return scale_ + std::log(mass_);
}

}  // namespace bdl
