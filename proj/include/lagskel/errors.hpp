#pragma once

#include <stdexcept>
#include <string>

namespace lagskel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or labeling length does not match the problem.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A multiplier lies outside the search box.
class DomainError : public Error {
 public:
  using Error::Error;
};

class SubmodularityError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration requested on too many variables.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Oracle or box configuration that cannot be served (e.g. box below the
/// submodularity bound, negative path weights inside the box).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Broken internal invariant; indicates a bug rather than bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lagskel
