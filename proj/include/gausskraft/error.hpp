#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gausskraft {

enum class ErrorCode {
  ZeroVector,
  DegeneratePolygon,
  NonPositiveDot,
  ToleranceNotReached,
  HullDegenerate,
  OriginNotInterior,
  NonTangent,
  UnsupportedDimension,
  TooLarge,
  InvalidInstance,
  Infeasible,
  NonPositiveDensity,
  InvalidInput,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code lets
/// callers branch on the failure kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gausskraft
