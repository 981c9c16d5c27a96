#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cogmod {

/// Every failure raised by the library carries one of these kinds so callers
/// (the CLI in particular) can map them to exit codes and messages.
enum class ErrorKind {
  SchemaMismatch,
  DomainError,
  EmptyDataset,
  TooFewParticipants,
  IoError,
  SyntaxError,
  DuplicateParameter,
  UnknownIdentifier,
  UnusedParameter,
  InvalidProgram,
  NumericsError,
  BindingError,
  IndexError,
  StepBudgetExceeded,
  ArityError,
  BoundsError,
  ParadigmMismatch,
  LengthMismatch,
  AllRestartsFailed,
  NonFiniteObjective,
  ParticipantSetMismatch,
  NonFiniteEvidence,
  MissingLabels,
  MissingCorrectMap,
  AllComponentsDisabled,
  EngineUnreachable,
  RateLimited,
  EmptyResponse,
  NoBlocksFound,
  DuplicateParameterSet,
  RunAborted,
  ConfigError,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parser diagnostic with a 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, std::string expected, const std::string& found);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  int line_;
  int column_;
  std::string expected_;
};

}  // namespace cogmod
