#pragma once

#include <stdexcept>
#include <string>

namespace herdselect {

enum class ErrorKind {
  InvalidArgument,
  MalformedRow,
  NonNumericCell,
  SingleClass,
  EmptyFile,
  ClassTooSmall,
  EmptyMask,
  LengthMismatch,
  EmptySet,
  BadM,
  DimensionMismatch,
  NonFiniteVelocity,
  TooShort,
  BadShape,
  InconsistentRanks,
  IoError,
  ParseError,
};

const char* to_string(ErrorKind kind) noexcept;

// All library failures are reported through this type; `kind()` is the
// stable, testable part and `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::NonNumericCell: return "NonNumericCell";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::ClassTooSmall: return "ClassTooSmall";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::BadM: return "BadM";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteVelocity: return "NonFiniteVelocity";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::BadShape: return "BadShape";
    case ErrorKind::InconsistentRanks: return "InconsistentRanks";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

inline void require(bool condition, ErrorKind kind, const std::string& detail) {
  if (!condition) throw Error(kind, detail);
}

}  // namespace herdselect
