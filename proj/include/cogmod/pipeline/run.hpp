#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cogmod/baselines.hpp"
#include "cogmod/comparison.hpp"
#include "cogmod/dataset.hpp"
#include "cogmod/fitting.hpp"
#include "cogmod/pipeline/candidates.hpp"
#include "cogmod/pipeline/engine.hpp"
#include "cogmod/pipeline/prompt.hpp"

namespace cogmod::pipeline {

struct RunConfig {
  Dataset dataset;
  SplitSpec split;
  Metric metric = Metric::BIC;
  int iterations = 10;
  std::size_t candidates_per_iteration = 3;
  int max_retries = 3;  // consecutive failed attempts before the run is aborted
  std::uint64_t seed = 0;
  FitOptions fit;       // its seed is replaced by one derived from `seed`
  PromptComponents components;
  double temperature = 0.2;
  std::size_t prompt_participants = 5;
  std::size_t prompt_trials = 100;
  Distinctness distinctness = Distinctness::IdenticalSet;
  std::vector<BaselineKind> baselines;  // compared with the winner on the test split
  RetryPolicy retry;
  Sleeper sleeper;
  unsigned jobs = 0;
  std::size_t mc_samples = 100'000;
  std::string run_id = "run";
};

struct CandidateRecord {
  int index = 0;
  std::string source;
  std::vector<std::string> param_names;
  std::string error;   // parse, validation, distinctness or fitting failure
  double score = 0.0;  // mean validation score; +inf on failure
  std::vector<FitResult> fits;

  bool ok() const noexcept { return error.empty(); }
};

struct AttemptLog {
  std::string prompt;
  std::string response;
  std::string error;  // set when the whole attempt failed
  std::vector<CandidateRecord> candidates;
};

struct IterationLog {
  int iteration = 0;
  int retries = 0;                  // failed attempts before the successful one
  std::vector<AttemptLog> attempts;  // the successful attempt is last
  std::string feedback_sent;
  std::string best_source;  // best model so far, after this iteration
  double best_score = 0.0;
};

struct RunResult {
  std::string run_id;
  Metric metric = Metric::BIC;
  std::vector<std::string> prompt_ids;
  std::vector<std::string> validation_ids;
  std::vector<std::string> test_ids;
  std::vector<IterationLog> iterations;
  std::string best_source;
  std::vector<std::string> best_param_names;
  double best_validation_score = 0.0;
  std::vector<std::string> used_names;
  std::vector<FitResult> test_fits;
  ComparisonReport comparison;

  /// Every prompt sent, in order.
  std::vector<std::string> prompts() const;
};

/// Split, then iterate prompt -> propose -> extract -> fit on the validation
/// split -> feedback. The winner is refit on the test split and compared
/// with the configured baselines. Throws RunAborted after `max_retries`
/// consecutive failed attempts, TooFewParticipants when a split is empty.
RunResult run(const RunConfig& config, ProposalEngine& engine);

using EngineFactory = std::function<std::unique_ptr<ProposalEngine>(std::uint64_t seed)>;

/// Independent runs with seeds derived from config.seed; each gets a fresh engine.
std::vector<RunResult> run_many(const RunConfig& config, std::size_t n_runs, const EngineFactory& make_engine);

/// Test-split participant ids or complete trial listings that occur in any prompt.
std::vector<std::string> prompt_leaks(const std::vector<std::string>& prompts, const Dataset& test,
                                      std::size_t max_trials);

void to_json(nlohmann::json& j, const RunResult& result);
/// Pretty-printed JSON; identical inputs give identical bytes.
std::string serialize(const RunResult& result);

/// prompts/NN.txt, responses/NN.txt, candidates/NN_k.mdl, fits.jsonl, report.json.
void write_archive(const RunResult& result, const std::filesystem::path& dir);

struct AblationRow {
  std::string component;  // "none" for the unablated reference
  std::string best_source;
  double mean_test_score = 0.0;
  double mean_delta = 0.0;  // ablated minus full, per participant
  std::vector<double> deltas;
  PairedTest test;          // H1: the ablated run scores higher (worse)
};

struct AblationReport {
  Metric metric = Metric::BIC;
  double full_mean_test_score = 0.0;
  std::vector<AblationRow> rows;
};

/// One full run with every component, then one run per entry of
/// `components` with that component disabled. "none" reruns the full prompt.
/// Each run gets a fresh engine built from the same seed.
AblationReport ablate(const RunConfig& config, const std::vector<std::string>& components, const EngineFactory& make_engine);

void to_json(nlohmann::json& j, const AblationReport& report);
std::string ablation_to_csv(const AblationReport& report);

}  // namespace cogmod::pipeline
