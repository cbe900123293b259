#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kamforge {

enum class ErrorCode {
  DivisionByZero,
  ContextMismatch,
  RationalInput,
  ParseError,
  GeneratorOrderViolation,
  ResonantDenominator,
  TruncationExceeded,
  DegenerateAlpha,
  InsufficientSupport,
  OrthogonalityCheckFailed,
  RightInverseCheckFailed,
  NoConvergence,
  BasinExceeded,
  RankDeficient,
  InsufficientSteps,
  SchemaError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the library. The code is stable and is what
/// reports and tests key on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A lattice vector I with (omega, I) = 0 was met while solving a homological
/// equation at t-order `order` (0 when the solve is not tied to an order).
class ResonantDenominator : public Error {
 public:
  ResonantDenominator(std::vector<int> lattice_vector, int order);

  const std::vector<int>& lattice_vector() const noexcept { return lattice_vector_; }
  int order() const noexcept { return order_; }

 private:
  std::vector<int> lattice_vector_;
  int order_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace kamforge
