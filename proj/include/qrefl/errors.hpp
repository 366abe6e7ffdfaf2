#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrefl {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI's JSON error report.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Invalid user input. `field()` holds the config path when known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string field = {})
      : Error("config", message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message) : Error("domain", message) {}
};

/// Programming-contract violation (e.g. mismatched array lengths).
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& message) : Error("internal", message) {}
};

/// Zero (or non-finite) pivot in the tridiagonal elimination.
class NumericalBreakdown : public Error {
 public:
  NumericalBreakdown(const std::string& message, std::size_t step)
      : Error("numerical-breakdown", message + " (step " + std::to_string(step) + ")"),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Adaptive ODE integration did not meet its tolerance within the step budget.
class IntegrationFailure : public Error {
 public:
  explicit IntegrationFailure(const std::string& message)
      : Error("integration-failure", message) {}
};

/// The transmitted wave would be evanescent; not supported.
class EvanescentTransmission : public Error {
 public:
  explicit EvanescentTransmission(const std::string& message)
      : Error("evanescent-transmission", message) {}
};

/// z-transform requested for a static (omega = 0) configuration.
class UndefinedTransform : public Error {
 public:
  explicit UndefinedTransform(const std::string& message)
      : Error("undefined-transform", message) {}
};

/// Not enough maxima in an x0 scan to extrapolate.
class ExtrapolationUnavailable : public Error {
 public:
  explicit ExtrapolationUnavailable(const std::string& message)
      : Error("extrapolation-unavailable", message) {}
};

}  // namespace qrefl
