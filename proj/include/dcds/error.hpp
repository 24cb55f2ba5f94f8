#pragma once

#include <stdexcept>
#include <string>

namespace dcds {

enum class ErrorCode {
  InvalidIdentifier,
  DuplicateAttribute,
  DuplicateFunction,
  DuplicateVariable,
  TypeError,
  UnknownSymbol,
  CyclicEmbedding,
  MissingReturn,
  EmptyThenBranch,
  UnknownExposedFunction,
  AlreadyInjected,
  NotInjected,
  InvalidRef,
  InvalidColumn,
  IndexOutOfBounds,
  CapacityExceeded,
  LockProtocolViolation,
  SchemaConflict,
  InvalidState,
  UnknownMethod,
  ArityOrTypeMismatch,
  UsageError,
};

const char* error_code_name(ErrorCode code);

/// Exception type used across the builder, runtime and executor.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dcds
