#include "cogmod/error.hpp"

#include <fmt/format.h>

namespace cogmod {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::TooFewParticipants: return "TooFewParticipants";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::DuplicateParameter: return "DuplicateParameter";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::UnusedParameter: return "UnusedParameter";
    case ErrorKind::InvalidProgram: return "InvalidProgram";
    case ErrorKind::NumericsError: return "NumericsError";
    case ErrorKind::BindingError: return "BindingError";
    case ErrorKind::IndexError: return "IndexError";
    case ErrorKind::StepBudgetExceeded: return "StepBudgetExceeded";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::BoundsError: return "BoundsError";
    case ErrorKind::ParadigmMismatch: return "ParadigmMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::AllRestartsFailed: return "AllRestartsFailed";
    case ErrorKind::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorKind::ParticipantSetMismatch: return "ParticipantSetMismatch";
    case ErrorKind::NonFiniteEvidence: return "NonFiniteEvidence";
    case ErrorKind::MissingLabels: return "MissingLabels";
    case ErrorKind::MissingCorrectMap: return "MissingCorrectMap";
    case ErrorKind::AllComponentsDisabled: return "AllComponentsDisabled";
    case ErrorKind::EngineUnreachable: return "EngineUnreachable";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::EmptyResponse: return "EmptyResponse";
    case ErrorKind::NoBlocksFound: return "NoBlocksFound";
    case ErrorKind::DuplicateParameterSet: return "DuplicateParameterSet";
    case ErrorKind::RunAborted: return "RunAborted";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

SyntaxError::SyntaxError(int line, int column, std::string expected, const std::string& found)
    : Error(ErrorKind::SyntaxError,
            fmt::format("line {}, column {}: expected {}, found {}", line, column, expected, found)),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

}  // namespace cogmod
