#pragma once

#include <stdexcept>
#include <string>

namespace granuflow {

enum class ErrorKind {
  MassMismatch,
  EmptyMeasure,
  TooLarge,
  OutOfRange,
  EmptyCloud,
  DegenerateLabels,
  GridMismatch,
  SolverDiverged,
  CflViolation,
  InvalidInterval,
  InvalidArgument,
  Io,
  Config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above, so
/// callers (the CLI in particular) can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace granuflow
