#pragma once

#include <stdexcept>
#include <string>

namespace workbench {

/// Base class for every error raised by the workbench.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad probability, bad size, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The inputs are well-formed but the model has no answer for them.
class ModelError : public Error {
 public:
  using Error::Error;
};

class NoSteadyStateError : public ModelError {
 public:
  using ModelError::ModelError;
};

class ArbitrageError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Explicit time stepping was asked to run with a step outside its stability bound.
class StabilityError : public ModelError {
 public:
  using ModelError::ModelError;
};

class ConvergenceError : public ModelError {
 public:
  using ModelError::ModelError;
};

class DegenerateError : public ModelError {
 public:
  using ModelError::ModelError;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

}  // namespace detail
}  // namespace workbench
