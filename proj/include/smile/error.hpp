#pragma once

#include <stdexcept>
#include <string>

namespace smile {

enum class ErrorKind {
  // corpus
  kUnbalancedBrackets,
  kMalformedTree,
  kEmptyTree,
  kLeafCountMismatch,
  kMissingRoot,
  kMultipleRoots,
  kCyclicHeads,
  kBadColumnCount,
  kOverlappingGoldSpans,
  kSchemaViolation,
  kAlignmentError,
  // graphs / io
  kUnknownFormat,
  kEmptyPath,
  // numerics
  kShapeMismatch,
  kEmptyMask,
  kEmptyCandidates,
  kNonFiniteValue,
  kNonFiniteLoss,
  // evaluation / training
  kUnalignedIds,
  kEmptyCorpus,
  kIo,
};

const char* error_kind_name(ErrorKind kind);

// True for failures of the numeric kernel (CLI exit code 3).
bool is_numeric_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, int line = 0);

  ErrorKind kind() const { return kind_; }
  // 1-based input line the error refers to, or 0.
  int line() const { return line_; }

 private:
  ErrorKind kind_;
  int line_;
};

}  // namespace smile
