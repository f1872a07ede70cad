#include "ocp/error.h"

namespace ocp {

namespace {

constexpr std::string_view kErrorNames[] = {
    "MissingColumn",   "DuplicateId",        "EmptyText",
    "MalformedRow",    "OutOfRangeScore",    "NonStochasticVector",
    "UnmatchedId",     "UnknownLabel",       "IoFailure",
    "SchemaVersionMismatch", "OutOfRange",   "UnlabeledRecord",
    "EmptyClass",      "EmptyCorpus",        "SingleClassData",
    "DimensionMismatch", "LengthMismatch",   "EmptyList",
    "IncompatibleDims", "EmptyDataset",      "TokenizerMismatch",
    "ModelNotFound",   "TranslationFailure", "IdCollision",
    "InvalidArgument", "Configuration",    "NonConvergence",
};

std::string format_error(ErrorCode code, const std::string& message,
                         int line) {
  std::string out(error_code_name(code));
  if (line > 0) out += " (line " + std::to_string(line) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  return kErrorNames[static_cast<size_t>(code)];
}

Error::Error(ErrorCode code, const std::string& message, int line)
    : std::runtime_error(format_error(code, message, line)),
      code_(code),
      line_(line) {}

}  // namespace ocp
