#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "cogmod/mdl/ast.hpp"
#include "cogmod/model.hpp"

namespace cogmod::mdl {

/// Maximum interpreted operations per trial before a run is aborted.
inline constexpr long kStepBudget = 10'000;

/// Smallest |denominator| accepted by `/` and `/=`.
inline constexpr double kDivisionGuard = 1e-12;

/// Parses MDL source and runs the paradigm-independent checks: duplicate or
/// unused parameters, unknown identifiers and functions, malformed `choose`.
Program parse(std::string_view source);

/// Paradigm-specific checks: every identifier is bound for `kind`, there is
/// one top-level `choose` per decision point in stage order, and no outcome
/// is read before the choice that produces it.
void validate(const Program& program, ParadigmKind kind);

/// Canonical source text; parse(print(p)) == p.
std::string print(const Program& program);
std::string print(const Expr& expr);

/// A validated program bound to a paradigm, ready to score or simulate.
class ProgramModel final : public Model {
 public:
  ProgramModel(Program program, ParadigmKind kind, std::string id);
  ~ProgramModel() override;

  const std::string& id() const override { return id_; }
  const ParameterSpec& parameters() const override { return spec_; }
  bool supports(ParadigmKind kind) const override { return kind == kind_; }
  std::unique_ptr<Episode> start(std::span<const double> theta) const override;

  const Program& program() const noexcept { return program_; }
  ParadigmKind kind() const noexcept { return kind_; }

  struct Compiled;

 private:
  Program program_;
  ParadigmKind kind_;
  std::string id_;
  ParameterSpec spec_;
  std::unique_ptr<const Compiled> compiled_;
};

double evaluate_nll(const Program& program, const ParticipantData& participant, std::span<const double> theta);

ParticipantData simulate(const Program& program, const TaskEnvironment& env, std::span<const double> theta,
                         int n_trials, std::uint64_t seed);

}  // namespace cogmod::mdl
