#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cogmod/dataset.hpp"
#include "cogmod/environment.hpp"
#include "cogmod/random.hpp"

namespace cogmod {

/// Lower clamp on emitted choice probabilities; the upper clamp is 1 - floor.
inline constexpr double kProbabilityFloor = 1e-10;

struct ParameterBound {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;

  friend bool operator==(const ParameterBound&, const ParameterBound&) = default;
};

struct ParameterSpec {
  std::vector<ParameterBound> bounds;

  std::size_t size() const noexcept { return bounds.size(); }
  std::vector<std::string> names() const;
  std::vector<double> lower() const;
  std::vector<double> upper() const;
  std::vector<double> center() const;

  friend bool operator==(const ParameterSpec&, const ParameterSpec&) = default;
};

/// Throws ArityError / BoundsError when theta does not fit the spec.
void check_parameters(const ParameterSpec& spec, std::span<const double> theta);

/// Normalises a raw probability vector and clamps every entry into
/// [floor, 1 - floor]. Throws NumericsError on non-finite, negative or
/// all-zero input.
std::vector<double> normalize_probabilities(std::span<const double> raw);

/// Receives the probability vector emitted at each choice point and returns
/// the response that is then bound for the rest of the trial.
class ChoiceSink {
 public:
  virtual ~ChoiceSink() = default;
  virtual int choose(int stage, std::span<const double> probabilities) = 0;
};

/// Mutable per-participant model state. `trial` reads pre-choice fields of
/// `record`, calls `sink.choose` at each choice point and may then read the
/// outcome fields the sink has filled in.
class Episode {
 public:
  virtual ~Episode() = default;
  virtual void trial(TrialRecord& record, ChoiceSink& sink) = 0;
};

/// Anything that can be scored and simulated: native baselines and MDL programs.
class Model {
 public:
  virtual ~Model() = default;

  virtual const std::string& id() const = 0;
  virtual const ParameterSpec& parameters() const = 0;
  virtual bool supports(ParadigmKind kind) const = 0;
  /// Fresh state for one participant; theta has already been checked.
  virtual std::unique_ptr<Episode> start(std::span<const double> theta) const = 0;
};

/// Number of scored choice events (two per trial in the two-stage task).
std::size_t observation_count(const ParticipantData& participant);

/// Negative log-likelihood of the observed responses. Checks arity, bounds and
/// paradigm compatibility before running.
double negative_log_likelihood(const Model& model, ParadigmKind kind, const ParticipantData& participant,
                               std::span<const double> theta);

/// Per-choice-point probability vectors (after normalisation and clamping) in
/// scoring mode; used by consistency checks.
std::vector<std::vector<double>> choice_probabilities(const Model& model, ParadigmKind kind,
                                                      const ParticipantData& participant,
                                                      std::span<const double> theta);

/// Generates one participant by sampling each choice point. `n_trials == 0`
/// runs the environment's natural length.
ParticipantData simulate(const Model& model, const TaskEnvironment& env, std::span<const double> theta, int n_trials,
                         std::uint64_t seed, std::string participant_id = "sim");

}  // namespace cogmod
