#ifndef OCP_ERROR_H_
#define OCP_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ocp {

enum class ErrorCode {
  kMissingColumn,
  kDuplicateId,
  kEmptyText,
  kMalformedRow,
  kOutOfRangeScore,
  kNonStochasticVector,
  kUnmatchedId,
  kUnknownLabel,
  kIoFailure,
  kSchemaVersionMismatch,
  kOutOfRange,
  kUnlabeledRecord,
  kEmptyClass,
  kEmptyCorpus,
  kSingleClassData,
  kDimensionMismatch,
  kLengthMismatch,
  kEmptyList,
  kIncompatibleDims,
  kEmptyDataset,
  kTokenizerMismatch,
  kModelNotFound,
  kTranslationFailure,
  kIdCollision,
  kInvalidArgument,
  kConfiguration,
  kNonConvergence,
};

std::string_view error_code_name(ErrorCode code);

// Every fallible operation in the toolkit throws this. `line` is the 1-based
// input line for parse errors and 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int line = 0);

  ErrorCode code() const { return code_; }
  int line() const { return line_; }

 private:
  ErrorCode code_;
  int line_;
};

}  // namespace ocp

#endif  // OCP_ERROR_H_
