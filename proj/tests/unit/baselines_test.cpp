#include <gtest/gtest.h>

#include <cmath>

#include "cogmod/error.hpp"
#include "cogmod/baselines.hpp"
#include "cogmod/synthgen.hpp"

using namespace cogmod;

namespace {

const std::vector<double> kValidities{0.9, 0.8, 0.7, 0.6};

HeuristicChoice choose(Heuristic h, std::vector<int> a, std::vector<int> b) {
  return heuristic_choice(h, a, b, kValidities);
}

}  // namespace

TEST(Heuristics, TtbFollowsTopFeature) { EXPECT_EQ(choose(Heuristic::TTB, {1, 0, 0, 0}, {0, 1, 1, 1}), HeuristicChoice::A); }

TEST(Heuristics, EqwCountsFeatures) { EXPECT_EQ(choose(Heuristic::EQW, {1, 0, 0, 0}, {0, 1, 1, 1}), HeuristicChoice::B); }

TEST(Heuristics, TtbFallsBackToNextFeature) {
  EXPECT_EQ(choose(Heuristic::TTB, {1, 0, 1, 0}, {1, 1, 0, 0}), HeuristicChoice::B);
}

TEST(Heuristics, IdenticalOptionsTie) {
  for (auto h : {Heuristic::TTB, Heuristic::EQW, Heuristic::WADD, Heuristic::Tallying}) {
    EXPECT_EQ(choose(h, {1, 0, 1, 1}, {1, 0, 1, 1}), HeuristicChoice::Tie);
  }
}

TEST(Heuristics, WaddMatchesBruteForceDotProducts) {
  EXPECT_EQ(choose(Heuristic::WADD, {0, 1, 1, 1}, {1, 1, 1, 0}), HeuristicChoice::B);
  for (int x = 0; x < 16; ++x) {
    for (int y = 0; y < 16; ++y) {
      std::vector<int> a(4), b(4);
      double sa = 0.0, sb = 0.0;
      for (int i = 0; i < 4; ++i) {
        a[static_cast<std::size_t>(i)] = (x >> i) & 1;
        b[static_cast<std::size_t>(i)] = (y >> i) & 1;
        sa += a[static_cast<std::size_t>(i)] * kValidities[static_cast<std::size_t>(i)];
        sb += b[static_cast<std::size_t>(i)] * kValidities[static_cast<std::size_t>(i)];
      }
      const auto expected = std::abs(sa - sb) < 1e-12 ? HeuristicChoice::Tie
                            : sa > sb                 ? HeuristicChoice::A
                                                      : HeuristicChoice::B;
      EXPECT_EQ(choose(Heuristic::WADD, a, b), expected) << x << " vs " << y;
    }
  }
}

TEST(Baselines, PwaddAtZeroTemperatureIsUniform) {
  DecisionProblemOptions options;
  options.n_features = 4;
  options.scale = FeatureScale::Binary;
  options.validities = kValidities;
  const auto agents = gen_agents(BaselineKind::PWADD, gen_decision_problems(options), 1, 80, 2);
  const std::vector<double> theta{0.3, 0.6, 0.1, 0.9, 0.0};
  EXPECT_NEAR(baseline_nll(BaselineKind::PWADD, agents.dataset.participants[0], theta), 80 * std::log(2.0), 1e-9);
}

TEST(Baselines, RwSingleUpdate) {
  // One rewarded choice of action 0 at alpha 0.1 moves V0 from 0.5 to 0.55,
  // which the next trial's choice probability reveals.
  ParticipantData p{"x", {LearningTrial{0, 0, 1, std::nullopt}, LearningTrial{0, 0, 0, std::nullopt}}};
  const std::vector<double> theta{0.1, 1.0};
  const double p2 = 1.0 / (1.0 + std::exp(-(0.55 - 0.5)));
  EXPECT_NEAR(baseline_nll(BaselineKind::RW, p, theta), std::log(2.0) - std::log(p2), 1e-12);
}

TEST(Baselines, RegistryNamesRoundTrip) {
  for (auto kind : all_baselines()) EXPECT_EQ(parse_baseline(baseline_name(kind)), kind);
  EXPECT_THROW(parse_baseline("nope"), Error);
  EXPECT_FALSE(baseline_supports(BaselineKind::RW4Alpha, ParadigmKind::learning(Feedback::Partial)));
  EXPECT_FALSE(baseline_supports(BaselineKind::RW4Alpha, ParadigmKind::decision()));
}

TEST(Baselines, RwAgentPrefersRicherArm) {
  // Monte Carlo over 1000 agents with alpha 0.3 and beta 5. The value gap settles near 0.6, so the
  // long-run share of the richer arm is bounded by sigmoid(5 * 0.6).
  const std::vector<double> theta{0.3, 5.0};
  const auto agents =
      gen_agents(BaselineKind::RW, BanditTask{}, 1000, 150, 21, std::optional<std::vector<double>>(theta));
  double share = 0.0;
  for (const auto& p : agents.dataset.participants) {
    int rich = 0;
    for (const auto& t : p.trials) rich += std::get<LearningTrial>(t).action == 1;
    share += rich / 150.0;
  }
  share /= 1000.0;
  EXPECT_GT(share, 0.8);
  EXPECT_LT(share, 1.0 / (1.0 + std::exp(-3.0)));
}

TEST(Baselines, RlwmPositiveFeedbackStoresReward) {
  // With omega = 1, no decay, no lapse and one stimulus per block, a rewarded
  // action is stored in working memory exactly and chosen almost surely.
  ParticipantData p{"x",
                    {MemoryTrial{0, 3, 0, 2, 1}, MemoryTrial{0, 3, 0, 2, 1}}};
  const std::vector<double> theta{0.5, 0.5, 0.0, 1.0, 0.0, 5.0};
  const double first = std::log(3.0);
  const double w_weight = std::exp(kWorkingMemoryBeta * 1.0);
  const double rest = std::exp(kWorkingMemoryBeta / 3.0);
  const double second = -std::log(w_weight / (w_weight + 2 * rest));
  EXPECT_NEAR(baseline_nll(BaselineKind::RLWM, p, theta), first + second, 1e-9);
}
