#pragma once

#include <stdexcept>
#include <string>

namespace fairround {

enum class ErrorKind {
  InvalidInstance,
  Lookup,
  Schema,
  Infeasible,
  BudgetViolated,
  ScaleExceeded,
  NotGroupHomogeneous,
  MalformedPreferences,
  NoneFound,
  InputNotAllocation,
  InvariantFailure,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace fairround
