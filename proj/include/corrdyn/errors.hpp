#pragma once

#include <stdexcept>
#include <string>

namespace corrdyn {

// Exit-code families used by the CLI: parse/config -> 2, invariant -> 3, budget -> 4.
struct ParseError : std::runtime_error {
  long byte_offset = -1;
  explicit ParseError(const std::string& msg, long offset = -1)
      : std::runtime_error(msg), byte_offset(offset) {}
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SizeBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroPolynomial : InvariantError {
  using InvariantError::InvariantError;
};

struct IdenticallyZeroFiber : InvariantError {
  using InvariantError::InvariantError;
};

struct DegenerateResultant : InvariantError {
  using InvariantError::InvariantError;
};

struct ChainInvariantViolation : InvariantError {
  using InvariantError::InvariantError;
};

struct GridMismatch : InvariantError {
  using InvariantError::InvariantError;
};

struct NotABlock : InvariantError {
  using InvariantError::InvariantError;
};

struct FiberEscapedBlock : InvariantError {
  int offending_cell = -1;
  explicit FiberEscapedBlock(const std::string& msg, int cell = -1)
      : InvariantError(msg), offending_cell(cell) {}
};

struct CriticalProximity : InvariantError {
  using InvariantError::InvariantError;
};

struct RootJumpDetected : InvariantError {
  using InvariantError::InvariantError;
};

}  // namespace corrdyn
