#include "cogmod/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cogmod/error.hpp"
#include "parallel.hpp"

namespace cogmod {

namespace {

int as_int(HeuristicChoice c) { return c == HeuristicChoice::A ? 0 : 1; }

HeuristicChoice swapped(HeuristicChoice c) {
  if (c == HeuristicChoice::Tie) return c;
  return c == HeuristicChoice::A ? HeuristicChoice::B : HeuristicChoice::A;
}

DecisionProblem draw_integer_problem(Rng& rng, int n_features, std::span<const int> priority) {
  const auto n = static_cast<std::size_t>(n_features);
  DecisionProblem p{std::vector<int>(n), std::vector<int>(n)};
  while (true) {
    bool distinct = true;
    for (std::size_t j = 0; j < n; ++j) {
      p.features_a[j] = static_cast<int>(rng.index(101));
      p.features_b[j] = static_cast<int>(rng.index(101));
      distinct = distinct && p.features_a[j] != p.features_b[j];
    }
    if (!distinct) continue;
    const auto ttb = heuristic_choice(Heuristic::TTB, p.features_a, p.features_b, {}, priority);
    const auto tally = heuristic_choice(Heuristic::Tallying, p.features_a, p.features_b, {});
    if (tally != HeuristicChoice::Tie && ttb != HeuristicChoice::Tie && tally != ttb) return p;
  }
}

DecisionProblem draw_binary_problem(Rng& rng, int n_features, std::span<const double> validities) {
  const auto n = static_cast<std::size_t>(n_features);
  DecisionProblem p{std::vector<int>(n), std::vector<int>(n)};
  while (true) {
    for (std::size_t j = 0; j < n; ++j) {
      p.features_a[j] = rng.bernoulli(0.5) ? 1 : 0;
      p.features_b[j] = rng.bernoulli(0.5) ? 1 : 0;
    }
    if (heuristic_choice(Heuristic::WADD, p.features_a, p.features_b, validities) != HeuristicChoice::Tie) return p;
  }
}

double mean_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::string participant_name(std::string_view prefix, std::size_t index) { return fmt::format("{}_{:03}", prefix, index); }

}  // namespace

std::vector<int> priority_order(int n_features, int first) {
  if (first < 0 || first >= n_features) throw Error(ErrorKind::DomainError, "priority feature out of range");
  std::vector<int> order{first};
  for (int j = 0; j < n_features; ++j) {
    if (j != first) order.push_back(j);
  }
  return order;
}

DecisionTask gen_decision_problems(const DecisionProblemOptions& options) {
  if (options.n_problems % 2 != 0) throw Error(ErrorKind::DomainError, "the problem count must be even to balance A and B");
  if (options.n_features < 1) throw Error(ErrorKind::DomainError, "at least one feature is needed");
  if (options.validities.size() != static_cast<std::size_t>(options.n_features)) {
    throw Error(ErrorKind::LengthMismatch, "one validity per feature is needed");
  }
  if (options.scale == FeatureScale::Integer && options.n_features < 3) {
    throw Error(ErrorKind::DomainError, "TTB and Tallying can only disagree without ties on three or more features");
  }
  const auto priority = priority_order(options.n_features, options.priority_feature);
  Rng rng(options.seed);
  DecisionTask task;
  task.validities = options.validities;
  for (std::size_t i = 0; i < options.n_problems; ++i) {
    DecisionProblem p = options.scale == FeatureScale::Integer
                            ? draw_integer_problem(rng, options.n_features, priority)
                            : draw_binary_problem(rng, options.n_features, options.validities);
    const auto verdict = options.scale == FeatureScale::Integer
                             ? heuristic_choice(Heuristic::TTB, p.features_a, p.features_b, {}, priority)
                             : heuristic_choice(Heuristic::WADD, p.features_a, p.features_b, options.validities);
    const auto wanted = i < options.n_problems / 2 ? HeuristicChoice::A : HeuristicChoice::B;
    if (verdict != wanted) std::swap(p.features_a, p.features_b);
    task.problems.push_back(std::move(p));
  }
  rng.shuffle(task.problems);
  return task;
}

Dataset simulate_heuristic_agents(Heuristic heuristic, const DecisionTask& task, double noise, std::size_t n_agents,
                                  std::uint64_t seed, std::span<const int> priority) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error(ErrorKind::DomainError, "noise must lie in [0, 1]");
  Dataset out;
  out.kind = ParadigmKind::decision();
  out.provenance = fmt::format("synthetic heuristic agents, noise {}", noise);
  for (std::size_t a = 0; a < n_agents; ++a) {
    Rng rng(derive_seed(seed, a));
    ParticipantData p;
    p.participant_id = participant_name("agent", a);
    for (const auto& problem : task.problems) {
      auto verdict = heuristic_choice(heuristic, problem.features_a, problem.features_b, task.validities, priority);
      if (verdict == HeuristicChoice::Tie) verdict = rng.bernoulli(0.5) ? HeuristicChoice::A : HeuristicChoice::B;
      if (rng.bernoulli(noise)) verdict = swapped(verdict);
      p.trials.emplace_back(DecisionTrial{problem.features_a, problem.features_b, task.validities, as_int(verdict)});
    }
    out.participants.push_back(std::move(p));
  }
  return out;
}

std::vector<double> sample_parameters(const ParameterSpec& spec, Rng& rng) {
  std::vector<double> theta;
  for (const auto& b : spec.bounds) {
    double lo = b.lower;
    double hi = b.upper;
    if (b.name.starts_with("beta")) {
      lo = std::max(lo, 1.0);
      hi = std::min(hi, 10.0);
    }
    theta.push_back(rng.uniform(lo, hi));
  }
  return theta;
}

nlohmann::json true_params_json(const GeneratedAgents& agents) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < agents.dataset.participants.size(); ++i) {
    nlohmann::json row{{"participant", agents.dataset.participants[i].participant_id}};
    for (std::size_t k = 0; k < agents.parameter_names.size(); ++k) row[agents.parameter_names[k]] = agents.true_params[i][k];
    out.push_back(std::move(row));
  }
  return out;
}

GeneratedAgents gen_agents(BaselineKind kind, const TaskEnvironment& env, std::size_t n_agents, int n_trials,
                           std::uint64_t seed, const std::optional<std::vector<double>>& theta) {
  const auto model = make_baseline(kind);
  GeneratedAgents out;
  out.environment = env;
  out.parameter_names = model->parameters().names();
  out.dataset.kind = paradigm_kind(env);
  if (const auto* bandit = std::get_if<BanditTask>(&env)) out.dataset.reward_alphabet = bandit->alphabet;
  out.dataset.provenance = fmt::format("synthetic {} agents, seed {}", baseline_name(kind), seed);
  for (std::size_t a = 0; a < n_agents; ++a) {
    Rng rng(derive_seed(seed, a));
    auto params = theta ? *theta : sample_parameters(model->parameters(), rng);
    out.dataset.participants.push_back(
        simulate(*model, env, params, n_trials, rng.next(), participant_name(baseline_name(kind), a)));
    out.true_params.push_back(std::move(params));
  }
  return out;
}

GeneratedAgents gen_bandit_agents(BaselineKind kind, std::size_t n_agents, int n_trials,
                                  std::array<double, 2> contingencies, std::uint64_t seed) {
  BanditTask task;
  task.blocks = {BanditBlock{contingencies, n_trials, "fixed"}};
  return gen_agents(kind, task, n_agents, n_trials, seed);
}

TwoStepTask twostep_task(int n_trials, bool drift) {
  TwoStepTask task;
  task.n_trials = n_trials;
  task.reward_probs = {{{0.7, 0.3}, {0.4, 0.6}}};
  task.drift_sd = drift ? 0.025 : 0.0;
  task.lower = 0.25;
  task.upper = 0.75;
  return task;
}

GeneratedAgents gen_twostep_agents(std::size_t n_agents, const std::optional<std::vector<double>>& theta,
                                   std::uint64_t seed, const TwoStepTask& task) {
  return gen_agents(BaselineKind::Hybrid, task, n_agents, task.n_trials, seed, theta);
}

RlwmTask rlwm_task(std::span<const int> set_sizes, int n_blocks, std::uint64_t seed) {
  if (set_sizes.empty() || n_blocks <= 0) throw Error(ErrorKind::DomainError, "an RLWM schedule needs blocks");
  Rng rng(seed);
  RlwmTask task;
  for (int b = 0; b < n_blocks; ++b) {
    RlwmBlock block;
    block.set_size = set_sizes[static_cast<std::size_t>(b) % set_sizes.size()];
    if (block.set_size <= 0) throw Error(ErrorKind::DomainError, "set sizes must be positive");
    for (int s = 0; s < block.set_size; ++s) {
      block.correct_action.push_back(static_cast<int>(rng.index(3)));
      for (int k = 0; k < kPresentationsPerStimulus; ++k) block.stimulus_order.push_back(s);
    }
    rng.shuffle(block.stimulus_order);
    task.blocks.push_back(std::move(block));
  }
  return task;
}

GeneratedAgents gen_rlwm_agents(std::size_t n_agents, const std::optional<std::vector<double>>& theta,
                                std::uint64_t seed, const RlwmTask& task) {
  return gen_agents(BaselineKind::RLWM, task, n_agents, natural_length(task), seed, theta);
}

Identification identify_model(const ParticipantData& participant, ParadigmKind kind,
                              std::span<const Model* const> candidates, const FitOptions& options) {
  if (candidates.empty()) throw Error(ErrorKind::DomainError, "no candidate models");
  Identification out;
  for (const Model* m : candidates) {
    out.candidates.push_back(m->id());
    out.fits.push_back(fit_one(*m, kind, participant, options));
  }
  std::vector<std::size_t> best{0};
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& incumbent = out.fits[best.front()];
    const auto& challenger = out.fits[i];
    if (challenger.nll < incumbent.nll || (challenger.nll == incumbent.nll && challenger.k < incumbent.k)) {
      best = {i};
    } else if (challenger.nll == incumbent.nll && challenger.k == incumbent.k) {
      best.push_back(i);
    }
  }
  std::size_t pick = best.front();
  if (best.size() > 1) {
    Rng rng(derive_seed(options.seed, "tie:" + participant.participant_id));
    pick = best[rng.index(best.size())];
  }
  out.model_id = out.candidates[pick];
  return out;
}

RecoveryReport recovery_study(const RecoveryConfig& config) {
  if (config.candidates.empty()) throw Error(ErrorKind::DomainError, "no candidate models");
  std::vector<std::unique_ptr<Model>> models;
  std::vector<const Model*> pointers;
  for (auto kind : config.candidates) {
    models.push_back(make_baseline(kind));
    pointers.push_back(models.back().get());
  }
  std::vector<GeneratedAgents> generated;
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t g = 0; g < config.generating.size(); ++g) {
    const auto kind = config.generating[g];
    generated.push_back(gen_bandit_agents(kind, config.n_agents, config.n_trials, config.contingencies,
                                          derive_seed(config.seed, baseline_name(kind))));
    for (std::size_t a = 0; a < config.n_agents; ++a) jobs.emplace_back(g, a);
  }

  RecoveryReport report;
  report.entries.resize(jobs.size());
  detail::parallel_for(jobs.size(), config.jobs, [&](std::size_t j) {
    const auto [g, a] = jobs[j];
    const auto& participant = generated[g].dataset.participants[a];
    const std::string truth(baseline_name(config.generating[g]));
    std::unique_ptr<Model> generating_model;
    const Model* truth_model = nullptr;
    for (const Model* m : pointers) {
      if (m->id() == truth) truth_model = m;
    }
    if (!truth_model) {
      generating_model = make_baseline(config.generating[g]);
      truth_model = generating_model.get();
    }
    auto id = identify_model(participant, generated[g].dataset.kind, pointers, config.fit);
    RecoveryEntry e;
    e.participant_id = participant.participant_id;
    e.true_model = truth;
    e.identified_model = id.model_id;
    e.true_params = generated[g].true_params[a];
    e.bic_alt = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t c = 0; c < id.fits.size(); ++c) {
      e.nll[id.candidates[c]] = id.fits[c].nll;
      if (id.candidates[c] == truth) {
        e.bic_true = id.fits[c].bic;
        e.fitted_params = id.fits[c].theta_hat;
        found = true;
      } else {
        e.bic_alt = std::min(e.bic_alt, id.fits[c].bic);
      }
    }
    if (!found) {
      auto fit = fit_one(*truth_model, generated[g].dataset.kind, participant, config.fit);
      e.bic_true = fit.bic;
      e.fitted_params = fit.theta_hat;
    }
    report.entries[j] = std::move(e);
  });

  for (auto kind : config.generating) {
    const std::string name(baseline_name(kind));
    std::vector<double> bics;
    std::size_t hits = 0;
    for (const auto& e : report.entries) {
      if (e.true_model != name) continue;
      bics.push_back(e.bic_true);
      hits += e.identified_model == name;
    }
    if (bics.empty()) {
      report.accuracy[name] = std::nullopt;
      continue;
    }
    report.accuracy[name] = static_cast<double>(hits) / static_cast<double>(bics.size());
    const double m = mean_of(bics);
    double ss = 0.0;
    for (double b : bics) ss += (b - m) * (b - m);
    report.mean_bic_true[name] = m;
    report.sem_bic_true[name] =
        bics.size() > 1 ? std::sqrt(ss / static_cast<double>(bics.size() - 1)) / std::sqrt(static_cast<double>(bics.size())) : 0.0;
  }
  return report;
}

void to_json(nlohmann::json& j, const RecoveryReport& report) {
  j = nlohmann::json::object();
  auto& entries = j["entries"] = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"participant", e.participant_id},
                       {"true_model", e.true_model},
                       {"identified_model", e.identified_model},
                       {"true_params", e.true_params},
                       {"fitted_params", e.fitted_params},
                       {"bic_true", e.bic_true},
                       {"bic_alt", std::isfinite(e.bic_alt) ? nlohmann::json(e.bic_alt) : nlohmann::json(nullptr)},
                       {"nll", e.nll}});
  }
  auto& accuracy = j["accuracy"] = nlohmann::json::object();
  for (const auto& [name, acc] : report.accuracy) accuracy[name] = acc ? nlohmann::json(*acc) : nlohmann::json(nullptr);
  j["mean_bic_true"] = report.mean_bic_true;
  j["sem_bic_true"] = report.sem_bic_true;
}

std::string recovery_to_csv(const RecoveryReport& report) {
  std::string out = "participant,true_model,identified_model,bic_true,bic_alt\n";
  for (const auto& e : report.entries) {
    out += fmt::format("{},{},{},{},{}\n", e.participant_id, e.true_model, e.identified_model, e.bic_true, e.bic_alt);
  }
  return out;
}

HeuristicStudyReport heuristic_study(const HeuristicStudyConfig& config) {
  constexpr int kFeatures = 3;
  constexpr int kPriority = 1;
  const auto agent_priority = priority_order(kFeatures, kPriority);

  struct Rule {
    std::string name;
    Heuristic heuristic;
    std::vector<int> priority;
  };
  std::vector<Rule> rules{{"tallying", Heuristic::Tallying, {}}};
  for (int f = 0; f < kFeatures; ++f) rules.push_back({fmt::format("ttb_f{}", f), Heuristic::TTB, {f}});

  auto predict = [](const Rule& rule, const DecisionTrial& t) {
    return heuristic_choice(rule.heuristic, t.features_a, t.features_b, t.validities, rule.priority);
  };

  HeuristicStudyReport report;
  const std::array<std::pair<const char*, Heuristic>, 2> generators{{{"ttb", Heuristic::TTB}, {"tallying", Heuristic::Tallying}}};
  for (const auto& [label, heuristic] : generators) {
    for (double noise : config.noise_levels) {
      HeuristicStudySummary summary{label, noise, 0.0, 0};
      double correct_total = 0.0;
      for (std::size_t run = 0; run < config.runs; ++run) {
        const auto run_seed = derive_seed(config.seed, fmt::format("{}:{}:{}", label, noise, run));
        DecisionProblemOptions train_options;
        train_options.n_problems = config.n_problems;
        train_options.priority_feature = kPriority;
        train_options.seed = derive_seed(run_seed, "train");
        DecisionProblemOptions test_options = train_options;
        test_options.n_problems = config.n_test;
        test_options.seed = derive_seed(run_seed, "test");
        const auto train_task = gen_decision_problems(train_options);
        const auto test_task = gen_decision_problems(test_options);
        const std::span<const int> priority =
            heuristic == Heuristic::TTB ? std::span<const int>(agent_priority) : std::span<const int>{};
        const auto train = simulate_heuristic_agents(heuristic, train_task, noise, 1, derive_seed(run_seed, "agent-train"), priority);
        const auto test = simulate_heuristic_agents(heuristic, test_task, noise, 1, derive_seed(run_seed, "agent-test"), priority);

        std::vector<std::size_t> matches(rules.size(), 0);
        for (const auto& record : train.participants.front().trials) {
          const auto& t = std::get<DecisionTrial>(record);
          for (std::size_t r = 0; r < rules.size(); ++r) {
            const auto verdict = predict(rules[r], t);
            matches[r] += verdict != HeuristicChoice::Tie && as_int(verdict) == t.choice;
          }
        }
        const auto top = *std::max_element(matches.begin(), matches.end());
        std::vector<std::size_t> tied;
        for (std::size_t r = 0; r < rules.size(); ++r) {
          if (matches[r] == top) tied.push_back(r);
        }
        Rng tie_rng(derive_seed(run_seed, "tie"));
        const auto& chosen = rules[tied[tie_rng.index(tied.size())]];

        std::size_t correct = 0;
        const auto& test_trials = test.participants.front().trials;
        for (const auto& record : test_trials) {
          const auto& t = std::get<DecisionTrial>(record);
          auto verdict = predict(chosen, t);
          if (verdict == HeuristicChoice::Tie) verdict = tie_rng.bernoulli(0.5) ? HeuristicChoice::A : HeuristicChoice::B;
          correct += as_int(verdict) == t.choice;
        }
        const double accuracy = test_trials.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test_trials.size());
        report.rows.push_back({label, noise, run, chosen.name, accuracy, test_trials.size()});
        correct_total += static_cast<double>(correct);
        summary.n_decisions += test_trials.size();
      }
      summary.mean_accuracy = summary.n_decisions == 0 ? 0.0 : correct_total / static_cast<double>(summary.n_decisions);
      report.summary.push_back(summary);
    }
  }
  return report;
}

void to_json(nlohmann::json& j, const HeuristicStudyReport& report) {
  j = nlohmann::json::object();
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"heuristic", r.heuristic},
                    {"noise", r.noise},
                    {"run", r.run},
                    {"identified", r.identified},
                    {"accuracy", r.accuracy},
                    {"n_test", r.n_test}});
  }
  auto& summary = j["summary"] = nlohmann::json::array();
  for (const auto& s : report.summary) {
    summary.push_back(
        {{"heuristic", s.heuristic}, {"noise", s.noise}, {"mean_accuracy", s.mean_accuracy}, {"n_decisions", s.n_decisions}});
  }
}

std::string heuristic_study_to_csv(const HeuristicStudyReport& report) {
  std::string out = "heuristic,noise,run,identified,accuracy,n_test\n";
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.heuristic, r.noise, r.run, r.identified, r.accuracy, r.n_test);
  }
  return out;
}

}  // namespace cogmod
