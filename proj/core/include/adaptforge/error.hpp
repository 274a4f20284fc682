#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adaptforge {

// Error codes double as the machine-readable names reported by the service.
enum class ErrorCode {
  kParseError,
  kCycle,
  kUnknownAtom,
  kDuplicateId,
  kNotApplicable,
  kNoPath,
  kInconsistentQuery,
  kEmptyCaseBase,
  kEmptyTrainingSet,
  kEmptyAfterPruning,
  kVocabularyMismatch,
  kIoError,
  kSchemaMismatch,
  kIllegalState,
  kInvalidArgument,
  kUnknownStrategy,
  kNoParent,
  kInconsistentVerdicts,
  kNotFound,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace adaptforge
