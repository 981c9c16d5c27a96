#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cogmod/model.hpp"

namespace cogmod {

enum class Metric { BIC, AIC };

std::string_view to_string(Metric metric) noexcept;
Metric parse_metric(std::string_view text);

/// 2 nll + k ln n, with n the number of scored choice events.
double bic(double nll, std::size_t k, std::size_t n);
/// 2 nll + 2 k.
double aic(double nll, std::size_t k);

struct FitOptions {
  int restarts = 20;
  std::uint64_t seed = 0;
  int max_evaluations = 2000;
  double ftol = 1e-6;
  double xtol = 1e-6;  // relative to each parameter's range
};

struct FitResult {
  std::string model_id;
  std::string participant_id;
  std::vector<double> theta_hat;
  double nll = 0.0;
  double bic = 0.0;
  double aic = 0.0;
  std::size_t n_obs = 0;
  std::size_t k = 0;
  std::size_t n_restarts = 0;
  bool converged = false;
  std::vector<double> restart_nlls;
  std::string error;  // set when the fit failed

  double score(Metric metric) const noexcept { return metric == Metric::BIC ? bic : aic; }

  friend bool operator==(const FitResult&, const FitResult&) = default;
};

void to_json(nlohmann::json& j, const FitResult& fit);
void from_json(const nlohmann::json& j, FitResult& fit);

/// `model,participant,nll,bic,aic,k,n,theta...` rows with a header line.
std::string fits_to_csv(std::span<const FitResult> fits);

struct LocalSearchResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead simplex search confined to the box [lower, upper] by
/// projecting every trial point. Evaluations that throw count as +inf.
LocalSearchResult minimize_in_box(const Objective& f, std::span<const double> lower, std::span<const double> upper,
                                  std::span<const double> start, const FitOptions& options);

struct MultiStartResult {
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> restart_values;
  bool converged = false;
};

/// Local searches from the box centre and then `options.restarts` uniform
/// starts drawn from one stream seeded by `options.seed`. Throws
/// AllRestartsFailed when every start raised, NonFiniteObjective when none
/// reached a finite value.
MultiStartResult minimize_multistart(const Objective& f, const ParameterSpec& spec, const FitOptions& options);

/// Fits one participant; the restart stream is seeded from (seed, participant id).
FitResult fit_one(const Model& model, ParadigmKind kind, const ParticipantData& participant, const FitOptions& options);

/// One result per participant, in dataset order. Failures are reported in
/// the entry (converged = false, error set) rather than thrown.
std::vector<FitResult> fit_all(const Model& model, const Dataset& dataset, const FitOptions& options,
                               unsigned parallelism = 0);

}  // namespace cogmod
