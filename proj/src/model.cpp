#include "cogmod/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "cogmod/error.hpp"

namespace cogmod {

std::vector<std::string> ParameterSpec::names() const {
  std::vector<std::string> out;
  for (const auto& b : bounds) out.push_back(b.name);
  return out;
}

std::vector<double> ParameterSpec::lower() const {
  std::vector<double> out;
  for (const auto& b : bounds) out.push_back(b.lower);
  return out;
}

std::vector<double> ParameterSpec::upper() const {
  std::vector<double> out;
  for (const auto& b : bounds) out.push_back(b.upper);
  return out;
}

std::vector<double> ParameterSpec::center() const {
  std::vector<double> out;
  for (const auto& b : bounds) out.push_back(0.5 * (b.lower + b.upper));
  return out;
}

void check_parameters(const ParameterSpec& spec, std::span<const double> theta) {
  if (theta.size() != spec.size()) {
    throw Error(ErrorKind::ArityError, fmt::format("expected {} parameters, got {}", spec.size(), theta.size()));
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const auto& b = spec.bounds[i];
    const double slack = 1e-12 * (b.upper - b.lower);
    if (!(theta[i] >= b.lower - slack && theta[i] <= b.upper + slack)) {
      throw Error(ErrorKind::BoundsError,
                  fmt::format("{}={} outside [{}, {}]", b.name, theta[i], b.lower, b.upper));
    }
  }
}

std::vector<double> normalize_probabilities(std::span<const double> raw) {
  double total = 0.0;
  for (double p : raw) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error(ErrorKind::NumericsError, fmt::format("invalid choice probability {}", p));
    }
    total += p;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorKind::NumericsError, "choice probabilities sum to zero");
  }
  std::vector<double> out(raw.begin(), raw.end());
  for (double& p : out) p = std::clamp(p / total, kProbabilityFloor, 1.0 - kProbabilityFloor);
  return out;
}

namespace {

void check_width(Paradigm paradigm, std::span<const double> probabilities) {
  if (probabilities.size() != static_cast<std::size_t>(option_count(paradigm))) {
    throw Error(ErrorKind::BindingError, fmt::format("choice over {} options, paradigm has {}",
                                                     probabilities.size(), option_count(paradigm)));
  }
}

class ScoringSink final : public ChoiceSink {
 public:
  ScoringSink(const TrialRecord& observed, Paradigm paradigm, std::vector<std::vector<double>>* trace)
      : observed_(observed), paradigm_(paradigm), trace_(trace) {}

  int choose(int stage, std::span<const double> probabilities) override {
    check_width(paradigm_, probabilities);
    auto p = normalize_probabilities(probabilities);
    const int value = choice_at(observed_, stage);
    if (value < 0 || static_cast<std::size_t>(value) >= p.size()) {
      throw Error(ErrorKind::BindingError, fmt::format("observed response {} has no probability", value));
    }
    nll += -std::log(p[static_cast<std::size_t>(value)]);
    if (trace_) trace_->push_back(std::move(p));
    return value;
  }

  double nll = 0.0;

 private:
  const TrialRecord& observed_;
  Paradigm paradigm_;
  std::vector<std::vector<double>>* trace_;
};

class SamplingSink final : public ChoiceSink {
 public:
  SamplingSink(TrialRecord& record, Paradigm paradigm, EnvironmentSession& env, Rng& rng)
      : record_(record), paradigm_(paradigm), env_(env), rng_(rng) {}

  int choose(int stage, std::span<const double> probabilities) override {
    check_width(paradigm_, probabilities);
    auto p = normalize_probabilities(probabilities);
    const int value = static_cast<int>(rng_.categorical(p));
    set_choice(record_, stage, value);
    env_.resolve(record_, stage);
    return value;
  }

 private:
  TrialRecord& record_;
  Paradigm paradigm_;
  EnvironmentSession& env_;
  Rng& rng_;
};

void check_model(const Model& model, ParadigmKind kind, std::span<const double> theta) {
  if (!model.supports(kind)) {
    throw Error(ErrorKind::ParadigmMismatch,
                fmt::format("model '{}' cannot be applied to {} data", model.id(), to_string(kind)));
  }
  check_parameters(model.parameters(), theta);
}

double run_scoring(const Model& model, ParadigmKind kind, const ParticipantData& participant,
                   std::span<const double> theta, std::vector<std::vector<double>>* trace) {
  check_model(model, kind, theta);
  auto episode = model.start(theta);
  double nll = 0.0;
  for (const auto& observed : participant.trials) {
    if (paradigm_of(observed) != kind.paradigm) {
      throw Error(ErrorKind::ParadigmMismatch, "participant trials do not match the paradigm");
    }
    TrialRecord record = observed;
    ScoringSink sink(observed, kind.paradigm, trace);
    episode->trial(record, sink);
    nll += sink.nll;
  }
  if (!std::isfinite(nll)) throw Error(ErrorKind::NumericsError, "non-finite negative log-likelihood");
  return nll;
}

}  // namespace

std::size_t observation_count(const ParticipantData& participant) {
  if (participant.trials.empty()) return 0;
  return participant.trials.size() *
         static_cast<std::size_t>(decision_stages(paradigm_of(participant.trials.front())));
}

double negative_log_likelihood(const Model& model, ParadigmKind kind, const ParticipantData& participant,
                               std::span<const double> theta) {
  return run_scoring(model, kind, participant, theta, nullptr);
}

std::vector<std::vector<double>> choice_probabilities(const Model& model, ParadigmKind kind,
                                                      const ParticipantData& participant,
                                                      std::span<const double> theta) {
  std::vector<std::vector<double>> trace;
  run_scoring(model, kind, participant, theta, &trace);
  return trace;
}

ParticipantData simulate(const Model& model, const TaskEnvironment& env, std::span<const double> theta, int n_trials,
                         std::uint64_t seed, std::string participant_id) {
  const ParadigmKind kind = paradigm_kind(env);
  check_model(model, kind, theta);
  if (n_trials <= 0) n_trials = natural_length(env);
  Rng rng(seed);
  EnvironmentSession session(env, rng);
  auto episode = model.start(theta);
  ParticipantData out{std::move(participant_id), {}};
  out.trials.reserve(static_cast<std::size_t>(n_trials));
  for (int t = 0; t < n_trials; ++t) {
    TrialRecord record = session.begin_trial();
    SamplingSink sink(record, kind.paradigm, session, rng);
    episode->trial(record, sink);
    for (int stage = 0; stage < decision_stages(kind.paradigm); ++stage) {
      if (choice_at(record, stage) < 0) {
        throw Error(ErrorKind::InvalidProgram, "model finished a trial without choosing at every stage");
      }
    }
    out.trials.push_back(std::move(record));
  }
  return out;
}

}  // namespace cogmod
