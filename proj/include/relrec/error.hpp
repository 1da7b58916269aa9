#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relrec {

enum class ErrorCode {
  InvalidArgument,
  IndexOutOfRange,
  DisorderExceeded,
  UnorderedInput,
  BudgetTooSmall,
  UnknownPaper,
  UnknownTerm,
  UnknownDocument,
  DegenerateGraph,
  EmptyInput,
  NoInputsResolved,
  EmptyRelevantSet,
  EmptyTestSet,
  InvalidConfig,
  Io,
  Parse,
};

std::string_view to_string(ErrorCode code);

/// Fatal errors raised by the library. Recoverable per-record problems are
/// reported as values (Skip, Drop) instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace relrec
