#pragma once

#include <stdexcept>
#include <string>

namespace hawkes_lab {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent shapes, out-of-range parameters or malformed inputs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The model violates one of the stability / moment assumptions.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, double condition_estimate)
      : NumericalError(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class NotPositiveSemidefiniteError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Raised when a path exceeds the configured event cap.
class RunawayProcessError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration file or command-line override.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hawkes_lab
