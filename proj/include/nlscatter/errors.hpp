#pragma once

#include <stdexcept>
#include <string>

namespace nlscatter {

// Precondition violated by the caller (bad argument, non-mean-zero target, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ArgumentError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class DomainError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class ConfigurationError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Numerical guard tripped (blow-up, non-convergence, non-finite values).
class NumericalGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DependencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define NLS_REQUIRE(cond, ErrType, msg) \
  do {                                  \
    if (!(cond)) throw ErrType(msg);    \
  } while (0)

}  // namespace nlscatter
