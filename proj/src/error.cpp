#include "ncslemma/error.hpp"

namespace ncslemma {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::AsymmetricCoefficients: return "AsymmetricCoefficients";
    case ErrorCode::SymmetryBroken: return "SymmetryBroken";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotGloballyPSD: return "NotGloballyPSD";
    case ErrorCode::SlaterViolated: return "SlaterViolated";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::SplitFailed: return "SplitFailed";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    case ErrorCode::WitnessConstructionFailed: return "WitnessConstructionFailed";
  }
  return "Unknown";
}

}  // namespace ncslemma
