#pragma once

#include <stdexcept>
#include <string>

namespace edfd {

/// Failure categories shared by the C++ core and the C API.
/// The numeric values are part of the public ABI (see edfd.h).
enum class ErrorCode : int {
  InvalidArgument = 1,
  SingularDenominator = 2,
  InvalidAlpha = 3,
  NotNonnegative = 4,
  NonpositiveState = 5,
  ZeroEntropyVariable = 6,
  StepSizeUnderflow = 7,
  PositivityLoss = 8,
  DegenerateWindow = 9,
  IncompatibleGrids = 10,
  UnknownPreset = 11,
  MalformedHeader = 12,
  TruncatedData = 13,
  ConfigError = 14,
  IoError = 15,
  CheckFailed = 16,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace edfd
