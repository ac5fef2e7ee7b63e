#pragma once

#include <complex>
#include <limits>
#include <optional>

namespace bdl {

/// Wraps an angle into (-pi, pi].
double normalize_phase(double phase);

/// A nonzero complex number stored as (natural log of magnitude, phase).
///
/// Quantities of size e^{O(lambda)} are carried in this form end to end; products are
/// additions of logs and sums factor out the larger magnitude.
class LogComplex {
 public:
  LogComplex() = default;
  LogComplex(double log_mag, double phase);

  /// Throws InvalidArgument for zero or non-finite input.
  static LogComplex from_complex(std::complex<double> value);
  /// exp(log_value), i.e. log_mag = Re, phase = Im (wrapped).
  static LogComplex from_log(std::complex<double> log_value);

  double log_mag() const noexcept { return log_mag_; }
  double phase() const noexcept { return phase_; }
  std::complex<double> log() const noexcept { return {log_mag_, phase_}; }
  /// Overflows to inf when log_mag exceeds the double range.
  std::complex<double> value() const;

  LogComplex conj() const noexcept { return {log_mag_, -phase_, raw_tag{}}; }
  LogComplex operator*(const LogComplex& other) const;
  LogComplex operator/(const LogComplex& other) const;
  /// Log-sum-exp addition. Throws MagnitudeUnderflow on exact cancellation.
  LogComplex operator+(const LogComplex& other) const;

 private:
  struct raw_tag {};
  LogComplex(double log_mag, double phase, raw_tag) : log_mag_(log_mag), phase_(phase) {}

  double log_mag_ = 0.0;
  double phase_ = 0.0;
};

/// Streaming accumulator for sums of terms factor * exp(log_term).
///
/// The running sum is kept relative to the largest real part seen so far, so no
/// intermediate leaves double range. Terms are added in caller order; the result is a
/// deterministic function of that order. The accumulator also tracks the largest single
/// term magnitude and the L1 mass, which together measure cancellation.
class LogSumAccumulator {
 public:
  void add(std::complex<double> log_term);
  void add(std::complex<double> log_term, std::complex<double> factor);

  bool empty() const noexcept { return scale_ == -std::numeric_limits<double>::infinity(); }
  /// log|sum|; -inf when the sum vanished exactly.
  double log_mag() const;
  /// log of the sum, or nullopt when it vanished.
  std::optional<LogComplex> result() const;
  /// max over terms of log|term|.
  double max_term_log_mag() const noexcept { return max_term_; }
  /// log of sum |term|.
  double log_mass() const;

  /// Sum expressed relative to exp(scale()).
  std::complex<double> scaled_sum() const noexcept { return sum_; }
  double scale() const noexcept { return scale_; }

 private:
  double scale_ = -std::numeric_limits<double>::infinity();
  std::complex<double> sum_{0.0, 0.0};
  double mass_ = 0.0;
  double max_term_ = -std::numeric_limits<double>::infinity();
};

}  // namespace bdl
