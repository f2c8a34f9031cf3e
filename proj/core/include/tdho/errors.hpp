#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace tdho {

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace detail

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad expression, CSV, or configuration. Not a numerical failure.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t position)
      : InputError(message + " at position " + std::to_string(position)), message_(message), position_(position) {}

  /// The message without the position suffix.
  const std::string& message() const noexcept { return message_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::string message_;
  std::size_t position_;
};

/// A time function was evaluated outside the range where it is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Any failure of the numerical pipeline (integrator, quadrature, caustics, decoupling).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IntegratorFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// No constant rotation angle cancels the cross term Gamma(t) Q1 Q2.
class NotDecouplable : public NumericalError {
 public:
  NotDecouplable(double residual, double threshold, double alpha)
      : NumericalError("system is not decouplable by a constant rotation: residual " + detail::sci(residual) +
                       " exceeds " + detail::sci(threshold)),
        residual_(residual),
        threshold_(threshold),
        alpha_(alpha) {}

  double residual() const noexcept { return residual_; }
  double threshold() const noexcept { return threshold_; }
  double best_alpha() const noexcept { return alpha_; }

 private:
  double residual_;
  double threshold_;
  double alpha_;
};

/// The propagator is singular: sin(phi) vanishes at the final time (focal point).
class Caustic : public NumericalError {
 public:
  explicit Caustic(double phase)
      : NumericalError("caustic: sin(phi) vanishes at phi = " + std::to_string(phase)), phase_(phase) {}

  double phase() const noexcept { return phase_; }

 private:
  double phase_;
};

class GridTooCoarse : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace tdho
