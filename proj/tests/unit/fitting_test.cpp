#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cogmod/error.hpp"
#include "cogmod/baselines.hpp"
#include "cogmod/fitting.hpp"
#include "cogmod/synthgen.hpp"

using namespace cogmod;

TEST(Criteria, BicArithmetic) {
  EXPECT_NEAR(bic(78.0, 2, 150), 166.02, 5e-3);
  EXPECT_NEAR(bic(100.0, 4, 96), 218.26, 5e-3);
  EXPECT_DOUBLE_EQ(bic(12.5, 0, 40), 25.0);
}

TEST(Criteria, AicArithmetic) {
  EXPECT_DOUBLE_EQ(aic(78.0, 2), 160.0);
  EXPECT_DOUBLE_EQ(aic(0.0, 0), 0.0);
  for (std::size_t n : {8u, 20u, 150u}) EXPECT_LT(aic(10.0, 3), bic(10.0, 3, n));
}

TEST(Optimizer, QuadraticMinimum) {
  const Objective f = [](std::span<const double> x) { return (x[0] - 0.3) * (x[0] - 0.3); };
  ParameterSpec spec{{{"x", 0.0, 1.0}}};
  FitOptions options;
  options.restarts = 3;
  const auto r = minimize_multistart(f, spec, options);
  EXPECT_NEAR(r.x[0], 0.3, 1e-4);
  EXPECT_EQ(r.restart_values.size(), 4u);
}

TEST(Optimizer, StaysInsideTheBox) {
  const Objective f = [](std::span<const double> x) { return -x[0] - x[1]; };
  const std::vector<double> lower{0, -1}, upper{1, 2}, start{0.5, 0.5};
  const auto r = minimize_in_box(f, lower, upper, start, FitOptions{});
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 2.0, 1e-6);
}

TEST(Optimizer, AllNonFiniteIsReported) {
  const Objective f = [](std::span<const double>) { return std::numeric_limits<double>::quiet_NaN(); };
  ParameterSpec spec{{{"x", 0.0, 1.0}}};
  FitOptions options;
  options.restarts = 2;
  EXPECT_THROW(minimize_multistart(f, spec, options), Error);
}

TEST(Fit, RecoveredNllNotAboveGeneratingPoint) {
  const std::vector<double> theta{0.3, 5.0};
  const auto agents = gen_bandit_agents(BaselineKind::RW, 3, 150, {0.2, 0.8}, 5);
  const auto model = make_baseline(BaselineKind::RW);
  FitOptions options;
  options.restarts = 5;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& p = agents.dataset.participants[i];
    const auto fit = fit_one(*model, agents.dataset.kind, p, options);
    ASSERT_TRUE(fit.converged);
    EXPECT_LE(fit.nll, negative_log_likelihood(*model, agents.dataset.kind, p, agents.true_params[i]) + 1e-9);
    EXPECT_EQ(fit.n_obs, 150u);
    EXPECT_NEAR(fit.bic, bic(fit.nll, 2, 150), 1e-12);
  }
}

TEST(Fit, ParallelismDoesNotChangeResults) {
  std::vector<int> set_sizes{3, 6};
  const auto task = rlwm_task(set_sizes, 2, 4);
  const auto agents = gen_rlwm_agents(6, std::nullopt, 4, task);
  const auto model = make_baseline(BaselineKind::RLWM);
  FitOptions options;
  options.restarts = 1;
  const auto serial = fit_all(*model, agents.dataset, options, 1);
  const auto parallel = fit_all(*model, agents.dataset, options, 8);
  ASSERT_EQ(serial.size(), 6u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].participant_id, agents.dataset.participants[i].participant_id);
    EXPECT_EQ(serial[i].theta_hat, parallel[i].theta_hat);
  }
}

TEST(Fit, OneBrokenParticipantDoesNotAffectOthers) {
  auto agents = gen_bandit_agents(BaselineKind::RW, 3, 60, {0.2, 0.8}, 9);
  // A participant whose trials carry an impossible action index cannot be scored.
  for (auto& t : agents.dataset.participants[1].trials) std::get<LearningTrial>(t).action = 7;
  const auto model = make_baseline(BaselineKind::RW);
  FitOptions options;
  options.restarts = 1;
  const auto fits = fit_all(*model, agents.dataset, options, 1);
  EXPECT_TRUE(fits[0].converged);
  EXPECT_FALSE(fits[1].converged);
  EXPECT_FALSE(fits[1].error.empty());
  EXPECT_TRUE(fits[2].converged);
}
