#ifndef CFP_ERRORS_HPP
#define CFP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cfp {

// Bad input: maps to CLI exit code 1.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Everything below maps to CLI exit code 2.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

// Enumeration or dense state space larger than the configured cap.
class ResourceError : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

// Conditioning on a cluster count whose normalization constant is zero.
class UnreachableConfiguration : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

class DegenerateChain : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

// Absorbing state not reachable from some transient state.
class StructuralError : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

class InsufficientData : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

}  // namespace cfp

#endif  // CFP_ERRORS_HPP
