#include "fracsko/error.hpp"

namespace fracsko {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::HurstOutOfRange: return "HurstOutOfRange";
    case ErrorCode::NonPositiveHorizon: return "NonPositiveHorizon";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NoInterval: return "NoInterval";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::CalibrationFailed: return "CalibrationFailed";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::QuadratureDiverged: return "QuadratureDiverged";
    case ErrorCode::IllConditionedOrder: return "IllConditionedOrder";
    case ErrorCode::RoughInput: return "RoughInput";
    case ErrorCode::RegimeUndefined: return "RegimeUndefined";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::TruncationTooLow: return "TruncationTooLow";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace fracsko
