#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gamediag {

enum class ErrorCode {
  InvalidGeometry,
  InvalidIntensity,
  AmbientTooBright,
  GamutExceeded,
  DuplicateTrial,
  UnknownChannel,
  InsufficientData,
  InfeasibleStimulus,
  OutOfOrder,
  NotFound,
  BadRequest,
  ReplayError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::InvalidIntensity: return "InvalidIntensity";
    case ErrorCode::AmbientTooBright: return "AmbientTooBright";
    case ErrorCode::GamutExceeded: return "GamutExceeded";
    case ErrorCode::DuplicateTrial: return "DuplicateTrial";
    case ErrorCode::UnknownChannel: return "UnknownChannel";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InfeasibleStimulus: return "InfeasibleStimulus";
    case ErrorCode::OutOfOrder: return "OutOfOrder";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::ReplayError: return "ReplayError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// service layer can map it onto a status code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by replay; carries the 1-based line number of the offending record.
class ReplayError : public Error {
 public:
  ReplayError(std::size_t line, const std::string& message)
      : Error(ErrorCode::ReplayError, "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gamediag
