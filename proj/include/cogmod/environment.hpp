#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cogmod/dataset.hpp"
#include "cogmod/random.hpp"

namespace cogmod {

struct BanditBlock {
  std::array<double, 2> p_reward{0.2, 0.8};
  int n_trials = 150;
  std::string label;  // e.g. "high" / "low"; used by learning-curve checks
};

/// Two-armed bandit; blocks repeat cyclically when more trials are requested.
struct BanditTask {
  std::vector<BanditBlock> blocks{BanditBlock{}};
  RewardAlphabet alphabet = RewardAlphabet::ZeroOne;
  Feedback feedback = Feedback::Partial;
};

/// Two-stage task: first-stage action a leads to second-stage state a with
/// probability `common`; second-stage reward probabilities may drift.
struct TwoStepTask {
  double common = 0.7;
  std::array<std::array<double, 2>, 2> reward_probs{{{0.7, 0.3}, {0.4, 0.6}}};
  double drift_sd = 0.0;
  double lower = 0.25;
  double upper = 0.75;
  int n_trials = 200;
};

struct DecisionProblem {
  std::vector<int> features_a;
  std::vector<int> features_b;

  friend bool operator==(const DecisionProblem&, const DecisionProblem&) = default;
};

struct DecisionTask {
  std::vector<DecisionProblem> problems;
  std::vector<double> validities;
};

struct RlwmBlock {
  int set_size = 3;
  std::vector<int> correct_action;  // per stimulus
  std::vector<int> stimulus_order;  // trial sequence of stimuli
};

struct RlwmTask {
  std::vector<RlwmBlock> blocks;
};

using TaskEnvironment = std::variant<BanditTask, TwoStepTask, DecisionTask, RlwmTask>;

ParadigmKind paradigm_kind(const TaskEnvironment& env);

/// Natural length of one pass through the environment's schedule.
int natural_length(const TaskEnvironment& env);

/// Steps an environment for one simulated participant. `begin_trial` fills
/// the pre-choice fields of a trial; `resolve` fills the outcomes that become
/// known after the response at `stage`.
class EnvironmentSession {
 public:
  EnvironmentSession(const TaskEnvironment& env, Rng& rng);

  TrialRecord begin_trial();
  void resolve(TrialRecord& trial, int stage);

 private:
  const TaskEnvironment& env_;
  Rng& rng_;
  int trial_ = 0;
  int block_ = 0;
  int position_in_block_ = 0;
  std::array<std::array<double, 2>, 2> twostep_probs_{};
};

/// Per-block facts for the bandit learning-curve check.
struct BlockInfo {
  int block = 0;
  std::string label;
  int better_action = 0;

  friend bool operator==(const BlockInfo&, const BlockInfo&) = default;
};

/// Block descriptors for the first `n_trials` trials of a bandit schedule.
std::vector<BlockInfo> bandit_block_info(const BanditTask& task, int n_trials);

/// (block, stimulus) -> correct action for an RLWM schedule.
std::vector<std::vector<int>> rlwm_correct_map(const RlwmTask& task, int n_trials);

}  // namespace cogmod
