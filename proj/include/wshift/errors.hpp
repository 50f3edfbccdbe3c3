#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wshift {

enum class ErrorKind {
  InvalidArgument,
  SingularModulus,
  WindowTooSmall,
  DimensionMismatch,
  IsometryViolation,
  PreconditionFailed,
  NotUnitary,
  NotCommuting,
  DegenerateSpectrum,
  VerificationFailed,
  GridTooShort,
  InvalidK,
  NotExampleShape,
  DistinctnessViolated,
  ParseError,
  InvariantError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SingularModulus: return "SingularModulus";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IsometryViolation: return "IsometryViolation";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::GridTooShort: return "GridTooShort";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::NotExampleShape: return "NotExampleShape";
    case ErrorKind::DistinctnessViolated: return "DistinctnessViolated";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvariantError: return "InvariantError";
  }
  return "Unknown";
}

/// Base exception of the library. Every failure carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wshift
