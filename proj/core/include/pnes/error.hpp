#pragma once

#include <stdexcept>
#include <string>

namespace pnes {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// All-zero Schmidt coefficients: no state can be formed.
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds what the truncated representation supports.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Profile or ancilla does not fit in the chosen truncation.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Density matrix lost positivity beyond tolerance.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// The RK4 integrator produced an unphysical state; retry with smaller dt.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// Invalid sweep or command configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pnes
