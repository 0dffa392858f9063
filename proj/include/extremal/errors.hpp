#pragma once

#include <stdexcept>
#include <string>

namespace extremal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rate field (lambda or rho) is not strictly positive on some cell.
class RatePositivityError : public Error {
 public:
  using Error::Error;
};

/// A field evaluates to NaN/inf, or is malformed (wrong cell count, bad domain).
class InvalidFieldError : public Error {
 public:
  using Error::Error;
};

/// A noise law does not satisfy F(t) = t + O(t^2) near zero.
class InvalidNoiseError : public Error {
 public:
  using Error::Error;
};

/// A sampler exceeded its iteration cap before its stopping rule fired.
class NonterminationError : public Error {
 public:
  NonterminationError(const std::string& what, std::size_t generated, double kth_value)
      : Error(what), generated_(generated), kth_value_(kth_value) {}

  std::size_t generated() const { return generated_; }
  double kth_value() const { return kth_value_; }

 private:
  std::size_t generated_;
  double kth_value_;
};

class EmptyFunctionError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature hit its maximum refinement without meeting tolerance.
class ToleranceError : public Error {
 public:
  ToleranceError(const std::string& what, double estimate)
      : Error(what), estimate_(estimate) {}

  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SampleSizeError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

/// Densities that cannot be tabulated in the requested mode.
class UnsupportedModeError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity violates an invariant it should satisfy by construction.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace extremal
