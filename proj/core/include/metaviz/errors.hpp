#pragma once

#include <stdexcept>
#include <string>

namespace metaviz {

/// Stable identifiers for every failure mode the library reports.
enum class ErrorCode {
  // candidate-set validation
  MismatchedSampleCount,
  NonFiniteCoordinate,
  DuplicateName,
  EmptySet,
  // geometry
  IndexOutOfRange,
  NegativeEntry,
  NonFiniteEntry,
  // spectral
  MixedSampleIndex,
  LengthMismatch,
  NotConverged,
  // fusion
  ShapeMismatch,
  AlreadySymmetrized,
  // embedders
  NotSymmetric,
  NonPositiveSigma,
  UnsupportedMethod,
  // simulation
  InvalidConfig,
  InvalidModel,
  FileNotFound,
  MalformedCloud,
  DegenerateTruth,
  // metrics
  ZeroVector,
  AllDegenerate,
  SingletonCluster,
  SingleCluster,
  ModeMismatch,
  PointAtCenter,
  ZeroVariance,
  // io
  ParseError,
  InconsistentColumnCount,
  WriteError,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception type carrying a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace metaviz
