#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracsko {

enum class ErrorCode {
  HurstOutOfRange,
  NonPositiveHorizon,
  InvalidGrid,
  Overflow,
  NoInterval,
  DomainError,
  CalibrationFailed,
  NotPositiveDefinite,
  QuadratureDiverged,
  IllConditionedOrder,
  RoughInput,
  RegimeUndefined,
  OrderTooHigh,
  EmptyRegion,
  TruncationTooLow,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace fracsko
