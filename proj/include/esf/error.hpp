#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace esf {

enum class ErrorCode {
  InvalidArgument,
  Singular,
  NotExpanding,
  NotIsotropic,
  NumericalBreakdown,
  NotPD,
  MaskPoleAtDigit,
  NoConvergence,
  NonSimpleEigenvalue,
  DegreeTooHigh,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status without string matching.
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

}  // namespace esf
