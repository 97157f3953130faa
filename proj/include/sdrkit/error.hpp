#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdrkit {

enum class ErrorCode {
  InvalidMatrix,
  InvalidVector,
  SingularCovariance,
  RankDeficient,
  DimensionMismatch,
  TooFewSamples,
  MissingKernelSpec,
  UnivariateOnly,
  TooManySlices,
  SliceTooSmall,
  InvalidSpec,
  MissingColumn,
  NonNumericCell,
  NegativeUnderSqrt,
  InvalidConfig,
  IoFailure,
};

inline std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code; every failure in the library
/// surfaces as one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::InvalidVector: return "InvalidVector";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::MissingKernelSpec: return "MissingKernelSpec";
    case ErrorCode::UnivariateOnly: return "UnivariateOnly";
    case ErrorCode::TooManySlices: return "TooManySlices";
    case ErrorCode::SliceTooSmall: return "SliceTooSmall";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::NegativeUnderSqrt: return "NegativeUnderSqrt";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace sdrkit
