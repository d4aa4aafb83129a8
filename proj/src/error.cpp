#include "smile/error.hpp"

namespace smile {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnbalancedBrackets: return "UnbalancedBrackets";
    case ErrorKind::kMalformedTree: return "MalformedTree";
    case ErrorKind::kEmptyTree: return "EmptyTree";
    case ErrorKind::kLeafCountMismatch: return "LeafCountMismatch";
    case ErrorKind::kMissingRoot: return "MissingRoot";
    case ErrorKind::kMultipleRoots: return "MultipleRoots";
    case ErrorKind::kCyclicHeads: return "CyclicHeads";
    case ErrorKind::kBadColumnCount: return "BadColumnCount";
    case ErrorKind::kOverlappingGoldSpans: return "OverlappingGoldSpans";
    case ErrorKind::kSchemaViolation: return "SchemaViolation";
    case ErrorKind::kAlignmentError: return "AlignmentError";
    case ErrorKind::kUnknownFormat: return "UnknownFormat";
    case ErrorKind::kEmptyPath: return "EmptyPath";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kEmptyMask: return "EmptyMask";
    case ErrorKind::kEmptyCandidates: return "EmptyCandidates";
    case ErrorKind::kNonFiniteValue: return "NonFiniteValue";
    case ErrorKind::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::kUnalignedIds: return "UnalignedIds";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

bool is_numeric_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShapeMismatch:
    case ErrorKind::kEmptyMask:
    case ErrorKind::kEmptyCandidates:
    case ErrorKind::kNonFiniteValue:
    case ErrorKind::kNonFiniteLoss:
      return true;
    default:
      return false;
  }
}

static std::string format_message(ErrorKind kind, const std::string& message,
                                  int line) {
  std::string out = error_kind_name(kind);
  if (line > 0) out += " (line " + std::to_string(line) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

Error::Error(ErrorKind kind, const std::string& message, int line)
    : std::runtime_error(format_message(kind, message, line)),
      kind_(kind),
      line_(line) {}

}  // namespace smile
