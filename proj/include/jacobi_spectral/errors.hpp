#pragma once

#include <stdexcept>
#include <string>

namespace jacobi_spectral {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// alpha, beta outside the admissible region.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Dimension mismatch between multi-indices, points, params or rules.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Scalar argument outside its documented range (t < 0, gamma <= 0, p <= 1, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Multi-index or level index outside the enumerated table.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Quadrature rule or table incompatible with the expansion being built.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A multiplier does not cover every level of the target table.
class CoverageError : public Error {
 public:
  using Error::Error;
};

// Malformed or divergent multiplier specification.
class SpecError : public Error {
 public:
  using Error::Error;
};

// Input violates an operation precondition (e.g. nonzero mean).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Numerical quadrature failed to reach tolerance within its budget.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace jacobi_spectral
