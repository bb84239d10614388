#pragma once

#include <stdexcept>
#include <string>

namespace dualcurve {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  unbounded,
  degenerate,
  budget_exceeded,
  unsupported_representation,
  engine_mismatch,
  precondition_violated,
  parse_error,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; the code drives CLI exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace dualcurve
