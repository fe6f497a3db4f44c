#pragma once

#include <stdexcept>
#include <string>

namespace lieosc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside its documented domain (variant mismatch, theta >= 1, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold for the inputs.
class PreconditionViolation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The quadrature grid is too coarse for the requested bandwidth or radius.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A computed quantity failed a numerical sanity check.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace lieosc
