#pragma once

#include <stdexcept>

namespace mdl {

// An argument violates the documented precondition of an operation.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The request is well-formed but exceeds an enumeration or memory guard.
class ResourceGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two independent computations of the same quantity disagreed.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mdl
