#include <gtest/gtest.h>

#include <cmath>

#include "cogmod/error.hpp"
#include "cogmod/baselines.hpp"
#include "cogmod/ppc.hpp"
#include "cogmod/synthgen.hpp"

using namespace cogmod;

TEST(PpcDecision, ExactTtbAgentIsFullyConsistent) {
  DecisionProblemOptions options;
  options.n_features = 4;
  options.scale = FeatureScale::Binary;
  options.validities = {0.9, 0.8, 0.7, 0.6};
  const auto task = gen_decision_problems(options);
  const auto data = simulate_heuristic_agents(Heuristic::TTB, task, 0.0, 3, 1);
  for (const auto& row : ppc_decision(data)) {
    EXPECT_DOUBLE_EQ(row.consistency[1].value(), 1.0);
    EXPECT_GT(row.consistency[1].n, 0u);
  }
}

TEST(PpcDecision, RandomChooserSitsAtChance) {
  DecisionProblemOptions options;
  options.n_problems = 400;
  const auto task = gen_decision_problems(options);
  const auto data = simulate_heuristic_agents(Heuristic::TTB, task, 0.5, 10, 2);
  Proportion wadd;
  for (const auto& row : ppc_decision(data)) wadd += row.consistency[2];
  EXPECT_NEAR(wadd.value(), 0.5, 1.96 * std::sqrt(0.25 / static_cast<double>(wadd.n)));
}

TEST(PpcLearning, RwAgentsImproveWithinBlocks) {
  BanditTask task;
  task.blocks = {BanditBlock{{0.2, 0.8}, 60, "high"}, BanditBlock{{0.6, 0.4}, 60, "reversal"}};
  const std::vector<double> theta{0.3, 5.0};
  const auto agents = gen_agents(BaselineKind::RW, task, 300, 120, 3, std::optional<std::vector<double>>(theta));
  const auto cells = pool(ppc_learning(agents.dataset, bandit_block_info(task, 120)));
  ASSERT_EQ(cells.size(), 4u);
  for (std::size_t i = 0; i < cells.size(); i += 2) {
    EXPECT_FALSE(cells[i].late);
    EXPECT_TRUE(cells[i + 1].late);
    EXPECT_GT(cells[i + 1].accuracy.value(), cells[i].accuracy.value()) << cells[i].label;
  }
}

TEST(PpcLearning, MissingLabelsAreReported) {
  const auto agents = gen_bandit_agents(BaselineKind::RW, 1, 30, {0.2, 0.8}, 4);
  try {
    ppc_learning(agents.dataset, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingLabels);
  }
}

TEST(PpcPlanning, ModelFreeAndModelBasedSignatures) {
  const auto task = twostep_task(200, false);
  const auto mf = pool(ppc_planning(gen_twostep_agents(40, std::vector<double>{0.5, 0.5, 1.0, 0.0, 8, 8, 0}, 5, task).dataset));
  const auto mb = pool(ppc_planning(gen_twostep_agents(40, std::vector<double>{0.5, 0.5, 0.5, 1.0, 8, 8, 0}, 5, task).dataset));
  EXPECT_GT(mf.at(true, true), mf.at(false, true));
  EXPECT_GT(mf.at(true, false), mf.at(false, false));
  EXPECT_LT(std::abs(mf.at(true, true) - mf.at(true, false)), 0.05);
  EXPECT_GT(mb.at(true, true), mb.at(true, false));
  EXPECT_GT(mb.at(false, false), mb.at(false, true));
}

TEST(PpcPlanning, SingleTrialIsFlagged) {
  Dataset d;
  d.kind = ParadigmKind::planning();
  d.participants.push_back({"x", {PlanningTrial{0, 0, 1, 1}}});
  const auto rows = ppc_planning(d);
  EXPECT_TRUE(rows[0].table.insufficient);
  EXPECT_EQ(rows[0].table.stay[1][1].n, 0u);
}

TEST(PpcRlwm, WorkingMemoryFavoursSmallSets) {
  const std::vector<int> set_sizes{3, 6};
  const auto task = rlwm_task(set_sizes, 4, 6);
  const auto agents = gen_rlwm_agents(300, std::vector<double>{0.1, 0.1, 0.2, 0.8, 0.02, 5.0}, 6, task);
  auto curves = pool(ppc_rlwm(agents.dataset, rlwm_correct_map(task, natural_length(task))));
  EXPECT_GT(curves[3][1].value(), curves[6][1].value());
}

TEST(PpcRlwm, PerfectAndRandomAgents) {
  const std::vector<int> set_sizes{3};
  const auto task = rlwm_task(set_sizes, 20, 7);
  const auto correct = rlwm_correct_map(task, natural_length(task));
  auto random = gen_rlwm_agents(20, std::vector<double>{0.0, 0.0, 0.0, 0.0, 1.0, 0.0}, 8, task);
  auto perfect = random.dataset;
  for (auto& p : perfect.participants) {
    for (auto& t : p.trials) {
      auto& m = std::get<MemoryTrial>(t);
      m.action = correct[static_cast<std::size_t>(m.block)][static_cast<std::size_t>(m.stimulus)];
    }
  }
  const auto good = pool(ppc_rlwm(perfect, correct));
  const auto chance = pool(ppc_rlwm(random.dataset, correct));
  for (std::size_t i = 0; i < kRlwmCurveLength; ++i) {
    EXPECT_DOUBLE_EQ(good.at(3)[i].value(), 1.0);
    EXPECT_NEAR(chance.at(3)[i].value(), 1.0 / 3.0, 0.1);
  }
}

TEST(Ppc, WrongParadigmIsRejected) {
  const auto agents = gen_bandit_agents(BaselineKind::RW, 1, 10, {0.2, 0.8}, 1);
  EXPECT_THROW(ppc_planning(agents.dataset), Error);
  EXPECT_THROW(ppc_decision(agents.dataset), Error);
}

TEST(Ppc, CsvIsTidy) {
  Dataset d;
  d.kind = ParadigmKind::planning();
  d.participants.push_back({"x", {PlanningTrial{0, 0, 1, 1}, PlanningTrial{0, 1, 0, 0}}});
  const auto csv = to_csv(ppc_planning(d));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "participant,statistic,value,n");
  EXPECT_NE(csv.find("x,stay_rewarded_common,1,1"), std::string::npos);
}
