#pragma once

#include <stdexcept>
#include <string>

namespace tracelab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or violated preconditions (configuration errors).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A configured size or compute cap would be exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Operands belong to different fields or rings.
class MismatchError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Inverse or division by zero.
class DivisionByZero : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace tracelab
