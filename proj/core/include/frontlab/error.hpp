#pragma once

#include <stdexcept>
#include <string>

namespace frontlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state left the invariant domain of the model.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Eigenvalues of the Jacobian collided or became complex.
class HyperbolicityError : public Error {
 public:
  using Error::Error;
};

/// Root bracketing or iteration failed.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Front tracking exceeded its event budget.
class InteractionBlowup : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario, manifest or text input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace frontlab
