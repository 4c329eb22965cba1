#pragma once

#include <stdexcept>
#include <string>

namespace forcetrack {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Rank-deficient input to a pseudo-inverse or rank-dependent formula.
class RankError : public Error {
 public:
  using Error::Error;
};

// Matrix is not symmetric, or not positive (semi-)definite where required.
class DefinitenessError : public Error {
 public:
  using Error::Error;
};

// Scalar argument outside its admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The unbiased filter cannot be formed because rank(HB) < m.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Continuous model violates one or more structural invariants.
class ModelError : public Error {
 public:
  using Error::Error;
};

class SequencingError : public Error {
 public:
  using Error::Error;
};

// Force file ran out of values before the requested step.
class ExhaustionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace forcetrack
