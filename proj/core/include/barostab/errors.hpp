#pragma once

#include <stdexcept>
#include <string>

namespace barostab {

/// Error taxonomy shared by all modules. Exceptions carry a stable code so
/// the CLI can map failures onto exit codes without string matching.
enum class ErrorCode {
  DensityOutOfRange,
  QuadratureFailure,
  BlowDown,
  StepFailure,
  BracketFailure,
  ToleranceFailure,
  NonFiniteState,
  WallClockBudget,
  InsufficientSamples,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace barostab
