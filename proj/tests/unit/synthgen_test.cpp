#include <gtest/gtest.h>

#include <cmath>

#include "cogmod/error.hpp"
#include "cogmod/baselines.hpp"
#include "cogmod/library.hpp"
#include "cogmod/mdl.hpp"
#include "cogmod/synthgen.hpp"

using namespace cogmod;

TEST(Problems, BalancedUnderGeneratingCriterion) {
  for (std::size_t n : {80u, 2u}) {
    DecisionProblemOptions options;
    options.n_problems = n;
    const auto task = gen_decision_problems(options);
    ASSERT_EQ(task.problems.size(), n);
    const auto order = priority_order(3, options.priority_feature);
    std::size_t a_superior = 0;
    for (const auto& p : task.problems) {
      const auto ttb = heuristic_choice(Heuristic::TTB, p.features_a, p.features_b, task.validities, order);
      const auto tally = heuristic_choice(Heuristic::Tallying, p.features_a, p.features_b, task.validities);
      ASSERT_NE(ttb, HeuristicChoice::Tie);
      ASSERT_NE(tally, HeuristicChoice::Tie);
      EXPECT_NE(ttb, tally);
      a_superior += ttb == HeuristicChoice::A;
    }
    EXPECT_EQ(a_superior, n / 2);
  }
}

TEST(Problems, SeededAndOddCountsRejected) {
  DecisionProblemOptions options;
  options.seed = 4;
  EXPECT_EQ(gen_decision_problems(options).problems, gen_decision_problems(options).problems);
  options.n_problems = 7;
  EXPECT_THROW(gen_decision_problems(options), Error);
}

namespace {

double agreement(double noise, std::uint64_t seed) {
  DecisionProblemOptions options;
  options.n_problems = 200;
  const auto task = gen_decision_problems(options);
  const auto order = priority_order(3, options.priority_feature);
  const auto data = simulate_heuristic_agents(Heuristic::TTB, task, noise, 10, seed, order);
  double hits = 0.0, n = 0.0;
  for (const auto& p : data.participants) {
    for (std::size_t i = 0; i < p.trials.size(); ++i) {
      const auto& t = std::get<DecisionTrial>(p.trials[i]);
      const auto rule = heuristic_choice(Heuristic::TTB, t.features_a, t.features_b, task.validities, order);
      hits += (rule == HeuristicChoice::A ? 0 : 1) == t.choice;
      n += 1;
    }
  }
  return hits / n;
}

}  // namespace

TEST(HeuristicAgents, NoiseSetsAgreement) {
  EXPECT_DOUBLE_EQ(agreement(0.0, 1), 1.0);
  const double ci = 1.96 * std::sqrt(0.25 / 2000.0);
  EXPECT_NEAR(agreement(0.5, 2), 0.5, ci);
  EXPECT_NEAR(agreement(0.25, 3), 0.75, 1.96 * std::sqrt(0.75 * 0.25 / 2000.0));
}

TEST(Agents, SeededGenerationIsReproducible) {
  const auto a = gen_bandit_agents(BaselineKind::RWKappa, 4, 50, {0.2, 0.8}, 12);
  const auto b = gen_bandit_agents(BaselineKind::RWKappa, 4, 50, {0.2, 0.8}, 12);
  EXPECT_EQ(a.dataset, b.dataset);
  EXPECT_EQ(a.true_params, b.true_params);
  for (const auto& row : a.true_params) {
    EXPECT_GE(row[1], 1.0);
    EXPECT_LE(row[1], 10.0);
  }
}

TEST(Identification, SingleCandidateIsReturned) {
  const auto agents = gen_bandit_agents(BaselineKind::RW, 1, 60, {0.2, 0.8}, 2);
  const auto rw = make_baseline(BaselineKind::RW);
  const std::vector<const Model*> models{rw.get()};
  FitOptions options;
  options.restarts = 1;
  const auto id = identify_model(agents.dataset.participants[0], agents.dataset.kind, models, options);
  EXPECT_EQ(id.model_id, "rw");
}

TEST(Identification, IdenticalCandidatesSplitEvenly) {
  const auto agents = gen_bandit_agents(BaselineKind::RW, 200, 30, {0.2, 0.8}, 6);
  const auto source = *transcription(BaselineKind::RW);
  const mdl::ProgramModel a(mdl::parse(source), agents.dataset.kind, "a");
  const mdl::ProgramModel b(mdl::parse(source), agents.dataset.kind, "b");
  const std::vector<const Model*> models{&a, &b};
  FitOptions options;
  options.restarts = 0;
  int first = 0;
  for (std::size_t i = 0; i < agents.dataset.participants.size(); ++i) {
    options.seed = i;
    const auto id = identify_model(agents.dataset.participants[i], agents.dataset.kind, models, options);
    ASSERT_EQ(id.fits[0].nll, id.fits[1].nll);
    first += id.model_id == "a";
  }
  EXPECT_NEAR(first / 200.0, 0.5, 1.96 * std::sqrt(0.25 / 200.0));
}

TEST(Recovery, NoAgentsLeavesAccuracyUndefined) {
  RecoveryConfig config;
  config.n_agents = 0;
  const auto r = recovery_study(config);
  EXPECT_TRUE(r.entries.empty());
  for (const auto& [model, acc] : r.accuracy) EXPECT_FALSE(acc.has_value()) << model;
}
