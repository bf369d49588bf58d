#pragma once

#include <stdexcept>
#include <string>

namespace spareopt {

// Root of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violated a documented precondition or invariant.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// An iterative numerical routine exhausted its iteration budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

// A stochastic model produced a value outside its contract
// (e.g. a negative lead time, an exhausted demand schedule).
class ModelError : public Error {
 public:
  using Error::Error;
};

// Configuration or file-format problem detected before any work starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace spareopt
