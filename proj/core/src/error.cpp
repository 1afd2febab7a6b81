#include "tfd/error.hpp"

namespace tfd {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::GateTooLarge: return "GateTooLarge";
    case ErrorCode::EmptyLattice: return "EmptyLattice";
    case ErrorCode::InvalidBodySize: return "InvalidBodySize";
    case ErrorCode::InvalidCoupling: return "InvalidCoupling";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::AntiunitaryMismatch: return "AntiunitaryMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::SpanOverflow: return "SpanOverflow";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::Incompatible: return "Incompatible";
    case ErrorCode::PoleError: return "PoleError";
    case ErrorCode::BelowCritical: return "BelowCritical";
    case ErrorCode::FitError: return "FitError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace tfd
