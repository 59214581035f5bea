#include "selinf/error.hpp"

namespace selinf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain_error";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::bracket_failure: return "bracket_failure";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::inconsistent_event: return "inconsistent_event";
    case ErrorCode::parse: return "parse_error";
    case ErrorCode::validation: return "validation_error";
    case ErrorCode::io: return "io_error";
    case ErrorCode::usage: return "usage_error";
  }
  return "unknown";
}

}  // namespace selinf
