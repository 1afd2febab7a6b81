#pragma once

#include <stdexcept>
#include <string>

namespace tfd {

enum class ErrorCode {
  InvalidMatrix,
  GateTooLarge,
  EmptyLattice,
  InvalidBodySize,
  InvalidCoupling,
  TooLarge,
  AntiunitaryMismatch,
  NoConvergence,
  InvalidGrid,
  SpanOverflow,
  InvalidSchedule,
  Incompatible,
  PoleError,
  BelowCritical,
  FitError,
  ConfigError,
  ParseError,
};

const char* to_string(ErrorCode code);

/// Single exception type for the toolkit; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tfd
