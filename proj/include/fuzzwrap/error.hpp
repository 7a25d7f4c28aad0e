#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fuzzwrap {

enum class ErrorCode {
  InvalidLexeme,
  OverlappingSpans,
  SpanOutsideParent,
  BoundaryInsideToken,
  InvalidSpan,
  NoRecords,
  EmptyTrainingSet,
  GlobalZoneNotFound,
  ZeroTotal,
  InvalidProfile,
  FormatError,
  NotFound,
  Conflict,
};

inline std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidLexeme: return "InvalidLexeme";
    case ErrorCode::OverlappingSpans: return "OverlappingSpans";
    case ErrorCode::SpanOutsideParent: return "SpanOutsideParent";
    case ErrorCode::BoundaryInsideToken: return "BoundaryInsideToken";
    case ErrorCode::InvalidSpan: return "InvalidSpan";
    case ErrorCode::NoRecords: return "NoRecords";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::GlobalZoneNotFound: return "GlobalZoneNotFound";
    case ErrorCode::ZeroTotal: return "ZeroTotal";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Conflict: return "Conflict";
  }
  return "Unknown";
}

// Every failure raised by the library. `offset` is set for label errors
// that can point at a character position in the page.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> offset = std::nullopt)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code),
        offset_(offset) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> offset_;
};

}  // namespace fuzzwrap
