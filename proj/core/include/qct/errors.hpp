#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace qct {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its allowed range. `field()` names the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// The covariance model is unusable (e.g. not positive semi-definite).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A record is too short for the requested processing.
class LengthError : public Error {
 public:
  using Error::Error;
};

/// Invalid selection/run configuration (unknown channel, overlapping channel sets...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A selection rule retained no events at all.
class EmptySelectionError : public Error {
 public:
  using Error::Error;
};

/// Too few retained events to report statistics.
class InsufficientStatisticsError : public Error {
 public:
  InsufficientStatisticsError(std::size_t count, std::size_t required)
      : Error("insufficient statistics: " + std::to_string(count) +
              " kept events, at least " + std::to_string(required) + " required"),
        count_(count),
        required_(required) {}

  std::size_t count() const noexcept { return count_; }
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t count_;
  std::size_t required_;
};

/// Estimator preconditions not met (too few values, empty input).
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside a function's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace qct
