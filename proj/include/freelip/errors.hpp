#pragma once

#include <stdexcept>
#include <string>

namespace freelip {

// Base of all library errors. Each subclass maps to a distinct CLI exit path.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape problems: non-square matrix, label/matrix size mismatch, bad base.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Bad numeric content: NaN, negative, asymmetric or zero off-diagonal entries.
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed input file or inline spec.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A caller broke a precondition (p out of range, f(base) != 0, x == y, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Objects built over different spaces were combined.
class SpaceMismatch : public ContractError {
 public:
  using ContractError::ContractError;
};

// Exact solver refused: instance too large for enumeration.
class SolverRangeError : public Error {
 public:
  using Error::Error;
};

inline void require_p(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw ContractError("p must lie in (0, 1], got " + std::to_string(p));
  }
}

}  // namespace freelip
