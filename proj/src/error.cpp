#include "tracelens/error.hpp"

namespace tracelens {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::cycle_detected: return "cycle-detected";
    case ErrorCode::duplicate_edge: return "duplicate-edge";
    case ErrorCode::invalid_dag: return "invalid-dag";
    case ErrorCode::malformed_row: return "malformed-row";
    case ErrorCode::malformed_dag: return "malformed-dag";
    case ErrorCode::nonpositive_delta: return "nonpositive-delta";
    case ErrorCode::count_overflow: return "count-overflow";
    case ErrorCode::too_many_traces: return "too-many-traces";
    case ErrorCode::threshold_too_small: return "threshold-too-small";
    case ErrorCode::mode_mismatch: return "mode-mismatch";
    case ErrorCode::infeasible_spec: return "infeasible-spec";
    case ErrorCode::budget_exceeded: return "budget-exceeded";
    case ErrorCode::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

bool is_usage_error(ErrorCode code) {
  return code == ErrorCode::invalid_argument || code == ErrorCode::nonpositive_delta ||
         code == ErrorCode::threshold_too_small || code == ErrorCode::mode_mismatch;
}

}  // namespace tracelens
