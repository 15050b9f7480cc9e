#pragma once

#include <stdexcept>
#include <string>

namespace robpost {

/// Invalid input: bad parameter values, malformed data, schema violations.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters or variance components that the data cannot pin down.
class IdentificationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Solver failure, non-convergence, ill-conditioning.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError(what);
}

}  // namespace robpost
