#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cogmod/dataset.hpp"
#include "cogmod/environment.hpp"

namespace cogmod {

/// Proportion with its denominator; `value` is NaN when `n == 0`.
struct Proportion {
  std::size_t hits = 0;
  std::size_t n = 0;

  double value() const noexcept;
  void add(bool hit) noexcept {
    hits += hit;
    ++n;
  }
  Proportion& operator+=(const Proportion& other) noexcept {
    hits += other.hits;
    n += other.n;
    return *this;
  }
  friend bool operator==(const Proportion&, const Proportion&) = default;
};

inline constexpr std::array<const char*, 3> kConsistencyHeuristics{"eqw", "ttb", "wadd"};

struct DecisionPpcRow {
  std::string participant_id;
  /// Matches with EQW, TTB and WADD, in kConsistencyHeuristics order. Trials
  /// where a heuristic ties are left out of its denominator.
  std::array<Proportion, 3> consistency;

  friend bool operator==(const DecisionPpcRow&, const DecisionPpcRow&) = default;
};

/// Throws ParadigmMismatch for non-decision data.
std::vector<DecisionPpcRow> ppc_decision(const Dataset& data);

struct LearningCell {
  std::string label;  // block label, e.g. "high" or "low"
  bool late = false;  // false = first third of the block, true = last third
  Proportion accuracy;

  friend bool operator==(const LearningCell&, const LearningCell&) = default;
};

struct LearningPpcRow {
  std::string participant_id;
  std::vector<LearningCell> cells;  // sorted by (label, early before late)

  friend bool operator==(const LearningPpcRow&, const LearningPpcRow&) = default;
};

/// Accuracy (choice of the block's better action) by block label and by the
/// first versus last third of each block. `blocks` is indexed by block
/// number. Throws MissingLabels when a block has no descriptor or no label,
/// ParadigmMismatch for non-learning data.
std::vector<LearningPpcRow> ppc_learning(const Dataset& data, const std::vector<BlockInfo>& blocks);

/// Pools cells with the same (label, phase) over participants.
std::vector<LearningCell> pool(const std::vector<LearningPpcRow>& rows);

struct StayTable {
  /// stay[rewarded][common]: P(repeat the first-stage action on the next trial).
  std::array<std::array<Proportion, 2>, 2> stay{};
  bool insufficient = false;  // fewer than two trials: table left empty

  double at(bool rewarded, bool common) const noexcept { return stay[rewarded][common].value(); }
  friend bool operator==(const StayTable&, const StayTable&) = default;
};

struct PlanningPpcRow {
  std::string participant_id;
  StayTable table;

  friend bool operator==(const PlanningPpcRow&, const PlanningPpcRow&) = default;
};

/// A transition is common when the second-stage state equals the first-stage
/// action. Throws ParadigmMismatch for non-planning data.
std::vector<PlanningPpcRow> ppc_planning(const Dataset& data);

StayTable pool(const std::vector<PlanningPpcRow>& rows);

inline constexpr std::size_t kRlwmCurveLength = 9;

struct RlwmPpcRow {
  std::string participant_id;
  /// Set size -> P(correct) at stimulus iterations 1..9.
  std::map<int, std::array<Proportion, kRlwmCurveLength>> curves;

  friend bool operator==(const RlwmPpcRow&, const RlwmPpcRow&) = default;
};

/// `correct` maps (block, stimulus) to the rewarded action. Throws
/// MissingCorrectMap when a block or stimulus is absent from it,
/// ParadigmMismatch for non-WM data.
std::vector<RlwmPpcRow> ppc_rlwm(const Dataset& data, const std::vector<std::vector<int>>& correct);

std::map<int, std::array<Proportion, kRlwmCurveLength>> pool(const std::vector<RlwmPpcRow>& rows);

/// Tidy `participant,statistic,value,n` tables.
std::string to_csv(const std::vector<DecisionPpcRow>& rows);
std::string to_csv(const std::vector<LearningPpcRow>& rows);
std::string to_csv(const std::vector<PlanningPpcRow>& rows);
std::string to_csv(const std::vector<RlwmPpcRow>& rows);

void to_json(nlohmann::json& j, const Proportion& p);

}  // namespace cogmod
