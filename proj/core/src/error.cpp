#include "adaptforge/error.hpp"

namespace adaptforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "parse_error";
    case ErrorCode::kCycle: return "cycle";
    case ErrorCode::kUnknownAtom: return "unknown_atom";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kNotApplicable: return "not_applicable";
    case ErrorCode::kNoPath: return "no_path";
    case ErrorCode::kInconsistentQuery: return "inconsistent_query";
    case ErrorCode::kEmptyCaseBase: return "empty_case_base";
    case ErrorCode::kEmptyTrainingSet: return "empty_training_set";
    case ErrorCode::kEmptyAfterPruning: return "empty_after_pruning";
    case ErrorCode::kVocabularyMismatch: return "vocabulary_mismatch";
    case ErrorCode::kIoError: return "io_error";
    case ErrorCode::kSchemaMismatch: return "schema_mismatch";
    case ErrorCode::kIllegalState: return "illegal_state";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kUnknownStrategy: return "unknown_strategy";
    case ErrorCode::kNoParent: return "no_parent";
    case ErrorCode::kInconsistentVerdicts: return "inconsistent_verdicts";
    case ErrorCode::kNotFound: return "not_found";
  }
  return "unknown";
}

}  // namespace adaptforge
