#include "kamforge/errors.hpp"

#include <sstream>

namespace kamforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::RationalInput: return "RationalInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::GeneratorOrderViolation: return "GeneratorOrderViolation";
    case ErrorCode::ResonantDenominator: return "ResonantDenominator";
    case ErrorCode::TruncationExceeded: return "TruncationExceeded";
    case ErrorCode::DegenerateAlpha: return "DegenerateAlpha";
    case ErrorCode::InsufficientSupport: return "InsufficientSupport";
    case ErrorCode::OrthogonalityCheckFailed: return "OrthogonalityCheckFailed";
    case ErrorCode::RightInverseCheckFailed: return "RightInverseCheckFailed";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BasinExceeded: return "BasinExceeded";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::InsufficientSteps: return "InsufficientSteps";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {

std::string describe_resonance(const std::vector<int>& v, int order) {
  std::ostringstream os;
  os << "(omega, I) = 0 for I = (";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  if (order > 0) os << " at t-order " << order;
  return os.str();
}

}  // namespace

ResonantDenominator::ResonantDenominator(std::vector<int> lattice_vector, int order)
    : Error(ErrorCode::ResonantDenominator, describe_resonance(lattice_vector, order)),
      lattice_vector_(std::move(lattice_vector)),
      order_(order) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace kamforge
