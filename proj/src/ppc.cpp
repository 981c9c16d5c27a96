#include "cogmod/ppc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cogmod/baselines.hpp"
#include "cogmod/error.hpp"

namespace cogmod {

namespace {

void require(const Dataset& data, Paradigm paradigm, std::string_view what) {
  if (data.kind.paradigm != paradigm) {
    throw Error(ErrorKind::ParadigmMismatch, fmt::format("{} needs {} data, got {}", what,
                                                         to_string(ParadigmKind{paradigm, data.kind.feedback}),
                                                         to_string(data.kind)));
  }
}

std::string format_value(const Proportion& p) {
  return p.n == 0 ? std::string() : fmt::format("{}", p.value());
}

}  // namespace

double Proportion::value() const noexcept {
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : static_cast<double>(hits) / static_cast<double>(n);
}

std::vector<DecisionPpcRow> ppc_decision(const Dataset& data) {
  require(data, Paradigm::DecisionMaking, "heuristic consistency");
  constexpr std::array<Heuristic, 3> kRules{Heuristic::EQW, Heuristic::TTB, Heuristic::WADD};
  std::vector<DecisionPpcRow> out;
  for (const auto& p : data.participants) {
    DecisionPpcRow row{p.participant_id, {}};
    for (const auto& record : p.trials) {
      const auto& t = std::get<DecisionTrial>(record);
      for (std::size_t h = 0; h < kRules.size(); ++h) {
        const auto verdict = heuristic_choice(kRules[h], t.features_a, t.features_b, t.validities);
        if (verdict == HeuristicChoice::Tie) continue;
        row.consistency[h].add((verdict == HeuristicChoice::A ? 0 : 1) == t.choice);
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<LearningPpcRow> ppc_learning(const Dataset& data, const std::vector<BlockInfo>& blocks) {
  require(data, Paradigm::Learning, "learning curves");
  std::vector<LearningPpcRow> out;
  for (const auto& p : data.participants) {
    std::map<int, std::vector<int>> by_block;
    for (const auto& record : p.trials) {
      const auto& t = std::get<LearningTrial>(record);
      by_block[t.block].push_back(t.action);
    }
    std::map<std::pair<std::string, bool>, Proportion> cells;
    for (const auto& [block, actions] : by_block) {
      if (block < 0 || static_cast<std::size_t>(block) >= blocks.size() || blocks[static_cast<std::size_t>(block)].label.empty()) {
        throw Error(ErrorKind::MissingLabels, fmt::format("block {} of participant '{}' has no label", block, p.participant_id));
      }
      const auto& info = blocks[static_cast<std::size_t>(block)];
      const std::size_t third = actions.size() / 3;
      for (std::size_t i = 0; i < third; ++i) {
        cells[{info.label, false}].add(actions[i] == info.better_action);
        cells[{info.label, true}].add(actions[actions.size() - third + i] == info.better_action);
      }
    }
    LearningPpcRow row{p.participant_id, {}};
    for (const auto& [key, proportion] : cells) row.cells.push_back({key.first, key.second, proportion});
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<LearningCell> pool(const std::vector<LearningPpcRow>& rows) {
  std::map<std::pair<std::string, bool>, Proportion> cells;
  for (const auto& row : rows) {
    for (const auto& c : row.cells) cells[{c.label, c.late}] += c.accuracy;
  }
  std::vector<LearningCell> out;
  for (const auto& [key, proportion] : cells) out.push_back({key.first, key.second, proportion});
  return out;
}

std::vector<PlanningPpcRow> ppc_planning(const Dataset& data) {
  require(data, Paradigm::Planning, "stay probabilities");
  std::vector<PlanningPpcRow> out;
  for (const auto& p : data.participants) {
    PlanningPpcRow row{p.participant_id, {}};
    row.table.insufficient = p.trials.size() < 2;
    for (std::size_t i = 0; i + 1 < p.trials.size(); ++i) {
      const auto& now = std::get<PlanningTrial>(p.trials[i]);
      const auto& next = std::get<PlanningTrial>(p.trials[i + 1]);
      const bool rewarded = now.reward > 0;
      const bool common = now.state_2 == now.action_1;
      row.table.stay[rewarded][common].add(next.action_1 == now.action_1);
    }
    out.push_back(std::move(row));
  }
  return out;
}

StayTable pool(const std::vector<PlanningPpcRow>& rows) {
  StayTable out;
  out.insufficient = true;
  for (const auto& row : rows) {
    if (row.table.insufficient) continue;
    out.insufficient = false;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) out.stay[r][c] += row.table.stay[r][c];
    }
  }
  return out;
}

std::vector<RlwmPpcRow> ppc_rlwm(const Dataset& data, const std::vector<std::vector<int>>& correct) {
  require(data, Paradigm::WorkingMemory, "RLWM learning curves");
  std::vector<RlwmPpcRow> out;
  for (const auto& p : data.participants) {
    RlwmPpcRow row{p.participant_id, {}};
    std::map<std::pair<int, int>, std::size_t> seen;
    for (const auto& record : p.trials) {
      const auto& t = std::get<MemoryTrial>(record);
      if (t.block < 0 || static_cast<std::size_t>(t.block) >= correct.size() || t.stimulus < 0 ||
          static_cast<std::size_t>(t.stimulus) >= correct[static_cast<std::size_t>(t.block)].size()) {
        throw Error(ErrorKind::MissingCorrectMap,
                    fmt::format("no correct action for block {}, stimulus {}", t.block, t.stimulus));
      }
      const std::size_t iteration = seen[{t.block, t.stimulus}]++;
      if (iteration >= kRlwmCurveLength) continue;
      const int target = correct[static_cast<std::size_t>(t.block)][static_cast<std::size_t>(t.stimulus)];
      row.curves[t.set_size][iteration].add(t.action == target);
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::map<int, std::array<Proportion, kRlwmCurveLength>> pool(const std::vector<RlwmPpcRow>& rows) {
  std::map<int, std::array<Proportion, kRlwmCurveLength>> out;
  for (const auto& row : rows) {
    for (const auto& [set_size, curve] : row.curves) {
      auto& target = out[set_size];
      for (std::size_t i = 0; i < kRlwmCurveLength; ++i) target[i] += curve[i];
    }
  }
  return out;
}

std::string to_csv(const std::vector<DecisionPpcRow>& rows) {
  std::string out = "participant,statistic,value,n\n";
  for (const auto& row : rows) {
    for (std::size_t h = 0; h < kConsistencyHeuristics.size(); ++h) {
      out += fmt::format("{},consistency_{},{},{}\n", row.participant_id, kConsistencyHeuristics[h],
                         format_value(row.consistency[h]), row.consistency[h].n);
    }
  }
  return out;
}

std::string to_csv(const std::vector<LearningPpcRow>& rows) {
  std::string out = "participant,statistic,value,n\n";
  for (const auto& row : rows) {
    for (const auto& c : row.cells) {
      out += fmt::format("{},accuracy_{}_{},{},{}\n", row.participant_id, c.label, c.late ? "late" : "early",
                         format_value(c.accuracy), c.accuracy.n);
    }
  }
  return out;
}

std::string to_csv(const std::vector<PlanningPpcRow>& rows) {
  std::string out = "participant,statistic,value,n\n";
  for (const auto& row : rows) {
    for (int r = 1; r >= 0; --r) {
      for (int c = 1; c >= 0; --c) {
        const auto& cell = row.table.stay[r][c];
        out += fmt::format("{},stay_{}_{},{},{}\n", row.participant_id, r ? "rewarded" : "unrewarded",
                           c ? "common" : "rare", format_value(cell), cell.n);
      }
    }
  }
  return out;
}

std::string to_csv(const std::vector<RlwmPpcRow>& rows) {
  std::string out = "participant,statistic,value,n\n";
  for (const auto& row : rows) {
    for (const auto& [set_size, curve] : row.curves) {
      for (std::size_t i = 0; i < kRlwmCurveLength; ++i) {
        out += fmt::format("{},correct_ss{}_iter{},{},{}\n", row.participant_id, set_size, i + 1, format_value(curve[i]),
                           curve[i].n);
      }
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const Proportion& p) {
  j = nlohmann::json{{"value", p.n == 0 ? nlohmann::json(nullptr) : nlohmann::json(p.value())}, {"n", p.n}};
}

}  // namespace cogmod
