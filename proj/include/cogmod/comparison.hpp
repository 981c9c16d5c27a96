#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cogmod/fitting.hpp"

namespace cogmod {

using Matrix = std::vector<std::vector<double>>;  // rows = participants

struct PairedTest {
  std::string better;       // lower mean score
  std::string worse;        // runner-up
  double mean_difference = 0.0;  // worse - better, per participant
  double t_stat = 0.0;
  double p_value = 1.0;     // one-sided: H1 says `worse` scores higher than `better`
  std::size_t df = 0;
};

/// One-sided paired t-test that the per-participant scores in `worse` exceed those in `better`.
PairedTest paired_t_test(const std::vector<double>& better, const std::vector<double>& worse);

struct ExceedanceResult {
  std::vector<double> exceedance;
  std::vector<double> alpha;              // posterior Dirichlet parameters
  std::vector<double> expected_frequency;
  int iterations = 0;
};

/// Random-effects Bayesian model selection. Each participant's log evidence
/// for each model enters a variational scheme with Dirichlet prior alpha0 = 1;
/// exceedance probabilities are then estimated by sampling the posterior
/// Dirichlet. Models with identical posterior parameters share their
/// exceedance equally, so the estimate is exactly equivariant under column
/// permutations.
ExceedanceResult exceedance_probability(const Matrix& log_evidence, std::size_t n_models, std::size_t mc_samples = 1'000'000,
                                        std::uint64_t seed = 0);

struct CompareOptions {
  Metric metric = Metric::BIC;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 0;
};

struct ComparisonReport {
  std::vector<std::string> models;
  std::vector<std::string> participants;
  std::vector<std::string> excluded;  // participants with a failed fit for some model
  Metric metric = Metric::BIC;
  Matrix scores;                      // participants x models
  std::vector<double> mean;
  std::vector<double> sem;
  PairedTest test;
  std::vector<double> exceedance;
  std::vector<double> alpha;
  std::string evidence = "log evidence approximated as -score/2";
};

/// Throws ParticipantSetMismatch when the models were not fit to the same participants.
ComparisonReport compare(const std::vector<std::pair<std::string, std::vector<FitResult>>>& fits,
                         const CompareOptions& options = {});
ComparisonReport compare(const std::map<std::string, std::vector<FitResult>>& fits, const CompareOptions& options = {});

void to_json(nlohmann::json& j, const ComparisonReport& report);

/// participant,model,score rows for plotting.
std::string scores_to_csv(const ComparisonReport& report);

}  // namespace cogmod
