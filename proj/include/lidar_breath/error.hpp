// SPDX-FileCopyrightText: 2026 lidar_breath contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIDAR_BREATH_ERROR_HPP
#define LIDAR_BREATH_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace lidar_breath {

enum class ErrorCode {
  InvalidRoi,
  EmptyFrame,
  EmptyInput,
  TooManyEmptyFrames,
  InvalidWindow,
  TooShort,
  InvalidDuration,
  TooFewFrames,
  InvalidConfig,
  BadLength,
  BadBlockFlag,
  BadAzimuth,
  DualReturn,
  EmptyStream,
  MalformedHeader,
  MalformedRow,
  NonMonotonicFrames,
  OutOfRange,
  LengthMismatch,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidRoi: return "InvalidRoi";
    case ErrorCode::EmptyFrame: return "EmptyFrame";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::TooManyEmptyFrames: return "TooManyEmptyFrames";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::InvalidDuration: return "InvalidDuration";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::BadBlockFlag: return "BadBlockFlag";
    case ErrorCode::BadAzimuth: return "BadAzimuth";
    case ErrorCode::DualReturn: return "DualReturn";
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonMonotonicFrames: return "NonMonotonicFrames";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library. `code()` identifies the condition,
/// `what()` carries the human-readable context (file, line, offset).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lidar_breath

#endif  // LIDAR_BREATH_ERROR_HPP
