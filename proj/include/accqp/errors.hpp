#pragma once

#include <stdexcept>
#include <string>

namespace accqp {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid solver or algorithm parameter (out-of-range rho, alpha, ...).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Operand shapes do not match.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A pivot stayed below the regularization floor during factorization.
class IndefiniteMatrix : public Error {
public:
  IndefiniteMatrix(std::string msg, int pivot_index)
      : Error(std::move(msg)), pivot(pivot_index) {}
  int pivot;
};

/// Box bounds with l_i > u_i.
class InfeasibleBounds : public Error {
public:
  using Error::Error;
};

/// Malformed QPS/MPS input. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
  ParseError(std::string msg, long line_number = 0)
      : Error(line_number > 0 ? "line " + std::to_string(line_number) + ": " + msg
                              : std::move(msg)),
        line(line_number) {}
  long line;
};

/// Numerical breakdown inside a solver step.
class NumericalError : public Error {
public:
  using Error::Error;
};

} // namespace accqp
