#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cbir {

enum class ErrorCode {
  EmptyCorpus,
  UnreadableDirectory,
  DecodeError,
  ClassTooSmall,
  LengthMismatch,
  DimensionMismatch,
  DegenerateClass,
  EmptyCandidatePool,
  NoRelevant,
  IoError,
  FormatVersionMismatch,
  ChecksumMismatch,
  ConfigMismatch,
  InvalidArgument,
  Internal,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cbir
