#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tracelens {

enum class ErrorCode {
  cycle_detected,
  duplicate_edge,
  invalid_dag,
  malformed_row,
  malformed_dag,
  nonpositive_delta,
  count_overflow,
  too_many_traces,
  threshold_too_small,
  mode_mismatch,
  infeasible_spec,
  budget_exceeded,
  invalid_argument,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception. The code names the
// module-level error so callers (the CLI in particular) can map it to an
// exit status without parsing messages.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// True for errors caused by the caller's arguments rather than by the data.
bool is_usage_error(ErrorCode code);

}  // namespace tracelens
