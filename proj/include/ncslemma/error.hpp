#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ncslemma {

enum class ErrorCode {
  InvalidInput,
  ParseError,
  ShapeMismatch,
  DimensionTooLarge,
  AsymmetricCoefficients,
  SymmetryBroken,
  NotPSD,
  NotGloballyPSD,
  SlaterViolated,
  PreconditionViolated,
  SplitFailed,
  VerificationFailed,
  WitnessConstructionFailed,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library. Mathematical outcomes (no
/// certificate found, inconclusive searches) are values, never exceptions.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace ncslemma
