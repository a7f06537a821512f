#ifndef LCGLN_ERRORS_H_
#define LCGLN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace lcgln {

// Tensor or vector dimensions disagree with what an operation expects.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition was violated by the caller.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN/Inf appeared in a gradient, loss, or intermediate value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An optimization oracle could not produce a decision.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed external data (returns files, sample caches, checkpoints).
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace lcgln

#endif  // LCGLN_ERRORS_H_
