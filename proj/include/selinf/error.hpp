#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selinf {

enum class ErrorCode {
  domain,            // argument outside the mathematical domain
  degenerate,        // numerically degenerate input (zero mass, zero variance, ...)
  bracket_failure,   // root bracketing did not converge
  dimension_mismatch,
  inconsistent_event,
  parse,
  validation,
  io,
  usage,
};

std::string_view to_string(ErrorCode code);

/// Exception type thrown by every selinf component. The code is stable and
/// machine-parsable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace selinf
