#pragma once

#include <stdexcept>
#include <string>

namespace pseudomode {

// Failure categories map one-to-one onto CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, non-finite samples, unreadable files.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the model's domain (e.g. an overdamped bath).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A truncation (Fock space, hierarchy depth) did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Refused to allocate an operator above the configured dimension cap.
class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace pseudomode
