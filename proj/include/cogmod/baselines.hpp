#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "cogmod/model.hpp"

namespace cogmod {

enum class BaselineKind { TTB, EQW, WADD, PWADD, RW, RWPlusMinus, RWKappa, RW4Alpha, Hybrid, RLWM };

/// Registry name: "ttb", "eqw", "wadd", "pwadd", "rw", "rwpm", "rwk", "rw4a", "hybrid", "rlwm".
std::string_view baseline_name(BaselineKind kind) noexcept;
BaselineKind parse_baseline(std::string_view name);
std::vector<BaselineKind> all_baselines();

const ParameterSpec& baseline_parameters(BaselineKind kind);
bool baseline_supports(BaselineKind kind, ParadigmKind paradigm) noexcept;

/// Inverse temperature used by the working-memory policy of the RLWM model.
inline constexpr double kWorkingMemoryBeta = 50.0;

/// Fixed first-stage transition matrix of the two-stage task.
inline constexpr double kCommonTransition = 0.7;
inline constexpr double kRareTransition = 0.3;

std::unique_ptr<Model> make_baseline(BaselineKind kind);

double baseline_nll(BaselineKind kind, const ParticipantData& participant, std::span<const double> theta);

ParticipantData baseline_simulate(BaselineKind kind, const TaskEnvironment& env, std::span<const double> theta,
                                  int n_trials, std::uint64_t seed);

enum class Heuristic { TTB, EQW, WADD, Tallying };
enum class HeuristicChoice { A, B, Tie };

/// Feature indices by descending validity; equal validities keep their order.
std::vector<int> validity_order(std::span<const double> validities);

/// Deterministic prediction of a decision heuristic. TTB inspects features in
/// `priority` order (default: validity order) and decides on the first one that
/// discriminates. Throws LengthMismatch on unequal vector lengths.
HeuristicChoice heuristic_choice(Heuristic heuristic, std::span<const int> features_a, std::span<const int> features_b,
                                 std::span<const double> validities, std::span<const int> priority = {});

}  // namespace cogmod
