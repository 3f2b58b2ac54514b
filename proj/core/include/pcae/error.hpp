#pragma once

#include <stdexcept>
#include <string>

namespace pcae {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not chain or match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input violates an operation's documented precondition
// (non-symmetric matrix, non-centered data, unordered weights, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Argument outside a function's mathematical domain (log of zero distance).
class DomainError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// NaN/Inf produced, solver failure, disconnected graph.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// File missing, malformed, or truncated.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcae
