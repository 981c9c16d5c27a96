#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cogmod/baselines.hpp"
#include "cogmod/environment.hpp"
#include "cogmod/fitting.hpp"

namespace cogmod {

enum class FeatureScale { Integer, Binary };

struct DecisionProblemOptions {
  std::size_t n_problems = 80;
  int n_features = 3;
  FeatureScale scale = FeatureScale::Integer;
  /// Feature inspected first by the generating TTB agent.
  int priority_feature = 1;
  std::vector<double> validities{0.7, 0.9, 0.6};
  std::uint64_t seed = 0;
};

/// Balanced problem set: exactly half the problems have A as the superior
/// option. With integer features the generating criterion is TTB on
/// `priority_feature`, and every problem is one where TTB and Tallying give
/// opposite, untied answers. With binary features the criterion is WADD on
/// the validities (ties rejected). Throws DomainError for an odd count.
DecisionTask gen_decision_problems(const DecisionProblemOptions& options);

/// Feature order with `first` moved to the front.
std::vector<int> priority_order(int n_features, int first);

/// Agents that follow `heuristic` and flip each decision with probability
/// `noise`. Ties are broken uniformly at random.
Dataset simulate_heuristic_agents(Heuristic heuristic, const DecisionTask& task, double noise, std::size_t n_agents,
                                  std::uint64_t seed, std::span<const int> priority = {});

/// Uniform draw from the model's bounds, with inverse temperatures restricted to [1, 10].
std::vector<double> sample_parameters(const ParameterSpec& spec, Rng& rng);

struct GeneratedAgents {
  Dataset dataset;
  std::vector<std::vector<double>> true_params;  // one row per participant
  std::vector<std::string> parameter_names;
  TaskEnvironment environment;
};

nlohmann::json true_params_json(const GeneratedAgents& agents);

/// Simulates `n_agents` participants of a native baseline. Parameters are
/// sampled per agent unless `theta` is given. Each agent draws from its own
/// stream derived from the seed and its index.
GeneratedAgents gen_agents(BaselineKind kind, const TaskEnvironment& env, std::size_t n_agents, int n_trials,
                           std::uint64_t seed, const std::optional<std::vector<double>>& theta = std::nullopt);

/// Two-armed bandit agents with binary rewards.
GeneratedAgents gen_bandit_agents(BaselineKind kind, std::size_t n_agents = 100, int n_trials = 150,
                                  std::array<double, 2> contingencies = {0.2, 0.8}, std::uint64_t seed = 0);

/// Two-stage task; second-stage reward probabilities are fixed unless
/// `drift`, in which case they follow a reflected Gaussian walk (sd 0.025)
/// inside [0.25, 0.75].
TwoStepTask twostep_task(int n_trials = 200, bool drift = false);

GeneratedAgents gen_twostep_agents(std::size_t n_agents, const std::optional<std::vector<double>>& theta,
                                   std::uint64_t seed, const TwoStepTask& task = twostep_task());

inline constexpr int kPresentationsPerStimulus = 9;

/// Blocks cycling through `set_sizes`, each with a random stimulus-to-action
/// map and every stimulus shown nine times in shuffled order.
RlwmTask rlwm_task(std::span<const int> set_sizes, int n_blocks, std::uint64_t seed);

GeneratedAgents gen_rlwm_agents(std::size_t n_agents, const std::optional<std::vector<double>>& theta,
                                std::uint64_t seed, const RlwmTask& task);

struct Identification {
  std::string model_id;
  std::vector<std::string> candidates;
  std::vector<FitResult> fits;  // same order as candidates
};

/// Fits every candidate and returns the one with the smallest NLL. Ties go to
/// the candidate with fewer parameters, then to a seeded coin flip.
Identification identify_model(const ParticipantData& participant, ParadigmKind kind,
                              std::span<const Model* const> candidates, const FitOptions& options);

struct RecoveryConfig {
  std::vector<BaselineKind> generating{BaselineKind::RWPlusMinus, BaselineKind::RWKappa};
  std::vector<BaselineKind> candidates{BaselineKind::RWPlusMinus, BaselineKind::RWKappa};
  std::size_t n_agents = 100;
  int n_trials = 150;
  std::array<double, 2> contingencies{0.2, 0.8};
  std::uint64_t seed = 0;
  FitOptions fit;
  unsigned jobs = 0;
};

struct RecoveryEntry {
  std::string participant_id;
  std::string true_model;
  std::string identified_model;
  std::vector<double> true_params;
  std::vector<double> fitted_params;  // fit of the generating model
  double bic_true = 0.0;              // BIC of the generating model
  double bic_alt = 0.0;               // best BIC among the other candidates
  std::map<std::string, double> nll;
};

struct RecoveryReport {
  std::vector<RecoveryEntry> entries;
  /// Per generating model; empty optional when it had no agents.
  std::map<std::string, std::optional<double>> accuracy;
  std::map<std::string, double> mean_bic_true;
  std::map<std::string, double> sem_bic_true;
};

/// Generate, identify and aggregate, agent by agent.
RecoveryReport recovery_study(const RecoveryConfig& config);

void to_json(nlohmann::json& j, const RecoveryReport& report);
std::string recovery_to_csv(const RecoveryReport& report);

struct HeuristicStudyConfig {
  std::vector<double> noise_levels{0.0, 0.25, 0.5};
  std::size_t runs = 10;
  std::size_t n_problems = 80;  // training problems per run
  std::size_t n_test = 80;      // fresh problems for scoring
  std::uint64_t seed = 0;
};

struct HeuristicStudyRow {
  std::string heuristic;   // generating heuristic
  double noise = 0.0;
  std::size_t run = 0;
  std::string identified;  // "tallying" or "ttb_f<k>"
  double accuracy = 0.0;   // agreement with the agent on fresh problems
  std::size_t n_test = 0;
};

struct HeuristicStudySummary {
  std::string heuristic;
  double noise = 0.0;
  double mean_accuracy = 0.0;
  std::size_t n_decisions = 0;
};

struct HeuristicStudyReport {
  std::vector<HeuristicStudyRow> rows;
  std::vector<HeuristicStudySummary> summary;
};

/// Identification of TTB and Tallying agents under flip noise. Each run
/// picks, among TTB on each single feature and Tallying, the rule that best
/// matches the agent's training decisions, then scores that rule against
/// the same agent's decisions on fresh problems.
HeuristicStudyReport heuristic_study(const HeuristicStudyConfig& config);

void to_json(nlohmann::json& j, const HeuristicStudyReport& report);
std::string heuristic_study_to_csv(const HeuristicStudyReport& report);

}  // namespace cogmod
