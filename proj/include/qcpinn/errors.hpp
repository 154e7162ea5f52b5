#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qcpinn {

/// Base of every error raised by the library. The CLI maps ConfigError to
/// exit status 2 and everything else to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration (shapes, ranges, unknown keys).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. non-finite t).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid quantum state (non-Hermitian, wrong trace, negative eigenvalue).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values produced during training.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t epoch)
      : Error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

/// ODE integration diverged.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double time)
      : Error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Scalar minimisation could not bracket or converge.
class OptimizationError : public Error {
 public:
  using Error::Error;
};

/// Linear system without a unique solution (degenerate steady state, I2 = 0, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace qcpinn
