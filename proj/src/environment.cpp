#include "cogmod/environment.hpp"

#include <algorithm>

#include "cogmod/error.hpp"

namespace cogmod {

namespace {

int reward_value(bool success, RewardAlphabet alphabet) {
  if (success) return 1;
  return alphabet == RewardAlphabet::ZeroOne ? 0 : -1;
}

double reflect(double x, double lo, double hi) {
  while (x < lo || x > hi) {
    if (x < lo) x = 2 * lo - x;
    if (x > hi) x = 2 * hi - x;
  }
  return x;
}

}  // namespace

ParadigmKind paradigm_kind(const TaskEnvironment& env) {
  switch (env.index()) {
    case 0: return ParadigmKind::learning(std::get<BanditTask>(env).feedback);
    case 1: return ParadigmKind::planning();
    case 2: return ParadigmKind::decision();
    default: return ParadigmKind::working_memory();
  }
}

int natural_length(const TaskEnvironment& env) {
  return std::visit(
      [](const auto& e) -> int {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, BanditTask>) {
          int n = 0;
          for (const auto& b : e.blocks) n += b.n_trials;
          return n;
        } else if constexpr (std::is_same_v<T, TwoStepTask>) {
          return e.n_trials;
        } else if constexpr (std::is_same_v<T, DecisionTask>) {
          return static_cast<int>(e.problems.size());
        } else {
          int n = 0;
          for (const auto& b : e.blocks) n += static_cast<int>(b.stimulus_order.size());
          return n;
        }
      },
      env);
}

EnvironmentSession::EnvironmentSession(const TaskEnvironment& env, Rng& rng) : env_(env), rng_(rng) {
  if (const auto* t = std::get_if<TwoStepTask>(&env_)) twostep_probs_ = t->reward_probs;
  std::visit(
      [](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, BanditTask> || std::is_same_v<T, RlwmTask>) {
          if (e.blocks.empty()) throw Error(ErrorKind::ConfigError, "environment has no blocks");
        } else if constexpr (std::is_same_v<T, DecisionTask>) {
          if (e.problems.empty()) throw Error(ErrorKind::ConfigError, "decision task has no problems");
        }
      },
      env_);
}

TrialRecord EnvironmentSession::begin_trial() {
  TrialRecord record = std::visit(
      [this](const auto& e) -> TrialRecord {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, BanditTask>) {
          const auto& blk = e.blocks[static_cast<std::size_t>(block_) % e.blocks.size()];
          if (position_in_block_ >= blk.n_trials) {
            ++block_;
            position_in_block_ = 0;
          }
          LearningTrial t;
          t.block = block_;
          return t;
        } else if constexpr (std::is_same_v<T, TwoStepTask>) {
          return PlanningTrial{};
        } else if constexpr (std::is_same_v<T, DecisionTask>) {
          const auto& problem = e.problems[static_cast<std::size_t>(trial_) % e.problems.size()];
          return DecisionTrial{problem.features_a, problem.features_b, e.validities, -1};
        } else {
          const auto* blk = &e.blocks[static_cast<std::size_t>(block_) % e.blocks.size()];
          if (position_in_block_ >= static_cast<int>(blk->stimulus_order.size())) {
            ++block_;
            position_in_block_ = 0;
            blk = &e.blocks[static_cast<std::size_t>(block_) % e.blocks.size()];
          }
          MemoryTrial t;
          t.block = block_;
          t.set_size = blk->set_size;
          t.stimulus = blk->stimulus_order[static_cast<std::size_t>(position_in_block_)];
          return t;
        }
      },
      env_);
  ++position_in_block_;
  ++trial_;
  return record;
}

void EnvironmentSession::resolve(TrialRecord& trial, int stage) {
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, BanditTask>) {
          auto& t = std::get<LearningTrial>(trial);
          const auto& blk = e.blocks[static_cast<std::size_t>(t.block) % e.blocks.size()];
          const double p_chosen = blk.p_reward[static_cast<std::size_t>(t.action)];
          const double p_other = blk.p_reward[static_cast<std::size_t>(1 - t.action)];
          t.reward = reward_value(rng_.bernoulli(p_chosen), e.alphabet);
          if (e.feedback == Feedback::Full) t.forgone_reward = reward_value(rng_.bernoulli(p_other), e.alphabet);
        } else if constexpr (std::is_same_v<T, TwoStepTask>) {
          auto& t = std::get<PlanningTrial>(trial);
          if (stage == 0) {
            t.state_2 = rng_.bernoulli(e.common) ? t.action_1 : 1 - t.action_1;
            return;
          }
          const double p = twostep_probs_[static_cast<std::size_t>(t.state_2)][static_cast<std::size_t>(t.action_2)];
          t.reward = rng_.bernoulli(p) ? 1 : 0;
          if (e.drift_sd > 0.0) {
            for (auto& row : twostep_probs_) {
              for (auto& q : row) q = reflect(q + rng_.normal(0.0, e.drift_sd), e.lower, e.upper);
            }
          }
        } else if constexpr (std::is_same_v<T, DecisionTask>) {
          (void)trial;
        } else {
          auto& t = std::get<MemoryTrial>(trial);
          const auto& blk = e.blocks[static_cast<std::size_t>(t.block) % e.blocks.size()];
          t.reward = blk.correct_action[static_cast<std::size_t>(t.stimulus)] == t.action ? 1 : 0;
        }
      },
      env_);
}

std::vector<BlockInfo> bandit_block_info(const BanditTask& task, int n_trials) {
  std::vector<BlockInfo> out;
  int remaining = n_trials;
  for (int block = 0; remaining > 0; ++block) {
    const auto& blk = task.blocks[static_cast<std::size_t>(block) % task.blocks.size()];
    out.push_back(BlockInfo{block, blk.label, blk.p_reward[1] > blk.p_reward[0] ? 1 : 0});
    remaining -= blk.n_trials;
  }
  return out;
}

std::vector<std::vector<int>> rlwm_correct_map(const RlwmTask& task, int n_trials) {
  std::vector<std::vector<int>> out;
  int remaining = n_trials;
  for (int block = 0; remaining > 0; ++block) {
    const auto& blk = task.blocks[static_cast<std::size_t>(block) % task.blocks.size()];
    out.push_back(blk.correct_action);
    remaining -= static_cast<int>(blk.stimulus_order.size());
  }
  return out;
}

}  // namespace cogmod
