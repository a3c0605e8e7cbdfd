#pragma once

#include <stdexcept>
#include <string>

namespace gboson {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes that do not fit together (non-square, wrong length, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inputs violating a documented precondition (particle number, symmetry, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Quantity is mathematically undefined for the given arguments.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Explicit cost guard tripped (factorial/exponential kernels, Hilbert space size).
class GuardError : public Error {
 public:
  using Error::Error;
};

/// Series or iterative method failed to reach the requested accuracy.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace gboson
