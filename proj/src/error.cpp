#include "edfd/error.hpp"

namespace edfd {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::NotNonnegative: return "NotNonnegative";
    case ErrorCode::NonpositiveState: return "NonpositiveState";
    case ErrorCode::ZeroEntropyVariable: return "ZeroEntropyVariable";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::PositivityLoss: return "PositivityLoss";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::IncompatibleGrids: return "IncompatibleGrids";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CheckFailed: return "CheckFailed";
  }
  return "Unknown";
}

}  // namespace edfd
