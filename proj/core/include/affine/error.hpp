#pragma once

#include <stdexcept>
#include <string>

namespace affine {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Cartan matrix that fails the affine-type validation.
class NotAffineError : public Error {
 public:
  using Error::Error;
};

/// Argument outside an operation's domain (index out of range, bad level, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A truncated computation could not certify the requested accuracy or coverage.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Internal consistency failure (zero Freudenthal denominator, negative
/// multiplicity, ...). Always indicates a bookkeeping bug, never bad input.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Floating-point precision control failed to reach the requested accuracy.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Enumeration exceeded a configured size cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

}  // namespace affine
