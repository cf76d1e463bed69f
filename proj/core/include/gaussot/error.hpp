#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaussot {

enum class ErrorKind {
  InvalidInput,
  NotPsd,
  SingularMatrix,
  NotSharedCorrelation,
  ContinuationDiverged,
  InvalidFrame,
  NumericalInconsistency,
  UnsupportedDimension,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries one of the kinds above so that
// callers (the CLI in particular) can map it to a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotSharedCorrelation: return "NotSharedCorrelation";
    case ErrorKind::ContinuationDiverged: return "ContinuationDiverged";
    case ErrorKind::InvalidFrame: return "InvalidFrame";
    case ErrorKind::NumericalInconsistency: return "NumericalInconsistency";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
  }
  return "Unknown";
}

}  // namespace gaussot
