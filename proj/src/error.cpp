#include "cbir/error.hpp"

namespace cbir {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::UnreadableDirectory: return "UnreadableDirectory";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateClass: return "DegenerateClass";
    case ErrorCode::EmptyCandidatePool: return "EmptyCandidatePool";
    case ErrorCode::NoRelevant: return "NoRelevant";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace cbir
