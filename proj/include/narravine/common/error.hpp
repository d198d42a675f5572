#pragma once

#include <stdexcept>
#include <string>

namespace narravine {

// Root of every error thrown by the library. Modules derive narrow error
// types from it so callers can catch by contract name.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

}  // namespace narravine
