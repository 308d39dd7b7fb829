#pragma once

#include <stdexcept>
#include <string>

namespace eep {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double where)
      : Error(what + " at x=" + std::to_string(where)), abscissa(where) {}
  double abscissa;
};

class BracketError : public Error {
 public:
  BracketError(const std::string& what, double f_lo, double f_hi)
      : Error(what), f_lo(f_lo), f_hi(f_hi) {}
  double f_lo;
  double f_hi;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best)
      : Error(what), best(best) {}
  double best;
};

// Raised by the boundary recursion; carries the failing step.
class BoundaryError : public Error {
 public:
  BoundaryError(const std::string& what, int step, double f_lo, double f_hi)
      : Error(what), step(step), f_lo(f_lo), f_hi(f_hi) {}
  int step;
  double f_lo;
  double f_hi;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace eep
