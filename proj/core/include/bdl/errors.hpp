#pragma once

#include <stdexcept>
#include <string>

namespace bdl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad parameters, wrong dimension, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative method or adaptive quadrature did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The computed magnitude sits below the cancellation budget of the summation, so the
/// value is indistinguishable from zero at working precision.
class MagnitudeUnderflow : public Error {
 public:
  MagnitudeUnderflow(const std::string& what, double log_mag, double max_term_log_mag)
      : Error(what), log_mag_(log_mag), max_term_log_mag_(max_term_log_mag) {}

  double log_mag() const noexcept { return log_mag_; }
  double max_term_log_mag() const noexcept { return max_term_log_mag_; }

 private:
  double log_mag_;
  double max_term_log_mag_;
};

}  // namespace bdl
