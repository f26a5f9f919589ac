#include "gausskraft/error.hpp"

namespace gausskraft {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::NonPositiveDot: return "NonPositiveDot";
    case ErrorCode::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorCode::HullDegenerate: return "HullDegenerate";
    case ErrorCode::OriginNotInterior: return "OriginNotInterior";
    case ErrorCode::NonTangent: return "NonTangent";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NonPositiveDensity: return "NonPositiveDensity";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace gausskraft
