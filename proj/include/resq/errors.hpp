#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace resq {

// Root of all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A non-finite or out-of-contract argument.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Input is inside the type's contract but outside the model's domain
// (e.g. no superfluid response above the transition temperature).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed to reach its tolerance.
class NumericError : public Error {
 public:
  NumericError(const std::string& msg, double achieved_tolerance)
      : Error(msg), achieved_tolerance(achieved_tolerance) {}
  double achieved_tolerance = 0.0;
};

// A fit could not be seeded from the data (e.g. no resonance dip present).
class FitInitError : public Error {
 public:
  using Error::Error;
};

// An iterative fit ran out of iterations; carries the last iterate.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& msg, std::vector<double> last_iterate)
      : Error(msg), last_iterate(std::move(last_iterate)) {}
  std::vector<double> last_iterate;
};

// Two series that must share an axis range do not overlap.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// Too few points (or too little span) to determine the requested parameters.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// A required region or component of a data set is missing.
class IncompleteDataError : public Error {
 public:
  using Error::Error;
};

// Malformed input file or value.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Bad configuration (unknown key, invalid value).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace resq
