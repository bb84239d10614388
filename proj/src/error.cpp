#include "dualcurve/error.hpp"

namespace dualcurve {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::unbounded: return "unbounded";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::budget_exceeded: return "budget_exceeded";
    case ErrorCode::unsupported_representation: return "unsupported_representation";
    case ErrorCode::engine_mismatch: return "engine_mismatch";
    case ErrorCode::precondition_violated: return "precondition_violated";
    case ErrorCode::parse_error: return "parse_error";
  }
  return "unknown";
}

}  // namespace dualcurve
