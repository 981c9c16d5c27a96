#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "cogmod/baselines.hpp"
#include "cogmod/error.hpp"
#include "cogmod/library.hpp"
#include "cogmod/mdl.hpp"
#include "cogmod/synthgen.hpp"

using namespace cogmod;

namespace {

constexpr const char* kRw = R"(params {
  lr: [0, 1]
  beta: [0, 20]
}
state {
  V = fill(2, 0.5)
}
trial {
  choose(action, softmax(beta * V))
  V[action] += lr * (reward - V[action])
}
)";

constexpr const char* kUniform = R"(params {
  bias: [-1, 1]
}
trial {
  choose(action, softmax([bias * 0, 0]))
}
)";

ErrorKind parse_error(std::string_view source) {
  try {
    mdl::parse(source);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "program parsed";
  return ErrorKind::ConfigError;
}

ParticipantData bandit_trials(std::initializer_list<std::pair<int, int>> trials) {
  ParticipantData p{"p", {}};
  for (auto [a, r] : trials) p.trials.emplace_back(LearningTrial{0, a, r, std::nullopt});
  return p;
}

}  // namespace

TEST(Mdl, MinimalRwProgramHasTwoParameters) {
  const auto program = mdl::parse(kRw);
  EXPECT_EQ(program.params.size(), 2u);
}

TEST(Mdl, UndeclaredIdentifierIsRejected) {
  EXPECT_EQ(parse_error("params {\n  lr: [0, 1]\n}\ntrial {\n  choose(action, softmax([lr, gamma]))\n}\n"),
            ErrorKind::UnknownIdentifier);
}

TEST(Mdl, UnusedParameterIsRejected) {
  EXPECT_EQ(parse_error("params {\n  lr: [0, 1]\n  kappa: [0, 1]\n}\ntrial {\n  choose(action, softmax([lr, 0]))\n}\n"),
            ErrorKind::UnusedParameter);
}

TEST(Mdl, SyntaxErrorCarriesPosition) {
  try {
    mdl::parse("params {\n  lr: [0, 1\n}\n");
    FAIL() << "program parsed";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_GT(e.column(), 0);
  }
}

TEST(Mdl, PrinterRoundTrips) {
  for (const auto& [name, source] : shipped_models()) {
    const auto program = mdl::parse(source);
    const auto printed = mdl::print(program);
    EXPECT_EQ(mdl::print(mdl::parse(printed)), printed) << name;
    EXPECT_TRUE(mdl::parse(printed) == program) << name;
  }
}

TEST(Mdl, ZeroInverseTemperatureGivesNLn2) {
  const auto program = mdl::parse(kRw);
  const auto p = bandit_trials({{0, 1}, {1, 0}, {1, 1}, {0, 0}, {1, 1}});
  const std::vector<double> theta{0.4, 0.0};
  EXPECT_NEAR(mdl::evaluate_nll(program, p, theta), 5 * std::log(2.0), 1e-12);
}

TEST(Mdl, ThreeStepRecursionMatchesHandComputation) {
  // V = (.5, .5); after (a0, r1) V0 = .55; after (a0, r0) V0 = .495; then a1.
  const double expected = -std::log(0.5) - std::log(1.0 / (1.0 + std::exp(-0.25))) -
                          std::log(1.0 / (1.0 + std::exp(-0.025)));
  EXPECT_NEAR(expected, 1.949811903964314, 1e-12);
  const auto program = mdl::parse(kRw);
  const std::vector<double> theta{0.1, 5.0};
  EXPECT_NEAR(mdl::evaluate_nll(program, bandit_trials({{0, 1}, {0, 0}, {1, 1}}), theta), expected, 1e-12);
}

TEST(Mdl, TranscriptionAgreesWithNativeRw) {
  const auto agents = gen_bandit_agents(BaselineKind::RW, 5, 150, {0.2, 0.8}, 3);
  const auto program = load_shipped("rw", agents.dataset.kind);
  const auto native = make_baseline(BaselineKind::RW);
  for (std::size_t i = 0; i < agents.dataset.participants.size(); ++i) {
    const auto& p = agents.dataset.participants[i];
    EXPECT_NEAR(negative_log_likelihood(*program, agents.dataset.kind, p, agents.true_params[i]),
                negative_log_likelihood(*native, agents.dataset.kind, p, agents.true_params[i]), 1e-9);
  }
}

TEST(Mdl, LargeBetaPicksDominantAction) {
  const auto program = mdl::parse(R"(params {
  beta: [0, 50]
}
trial {
  choose(action, softmax([1, 0], beta))
}
)");
  BanditTask task;
  task.blocks = {BanditBlock{{0.5, 0.5}, 10'000, "flat"}};
  const std::vector<double> theta{50.0};
  const auto p = mdl::simulate(program, task, theta, 10'000, 11);
  int zero = 0;
  for (const auto& t : p.trials) zero += std::get<LearningTrial>(t).action == 0;
  EXPECT_GE(zero, 9'900);
}

TEST(Mdl, SimulationIsDeterministic) {
  const auto program = mdl::parse(kRw);
  const std::vector<double> theta{0.3, 5.0};
  EXPECT_EQ(mdl::simulate(program, BanditTask{}, theta, 150, 5), mdl::simulate(program, BanditTask{}, theta, 150, 5));
}

TEST(Mdl, OwnDataBeatsUniformChoiceOnAverage) {
  const auto program = mdl::parse(kRw);
  const auto uniform = mdl::parse(kUniform);
  const std::vector<double> theta{0.3, 5.0};
  const std::vector<double> zero{0.0};
  double own = 0.0;
  double flat = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = mdl::simulate(program, BanditTask{}, theta, 150, seed);
    const double nll = mdl::evaluate_nll(program, p, theta);
    ASSERT_TRUE(std::isfinite(nll));
    own += nll;
    flat += mdl::evaluate_nll(uniform, p, zero);
  }
  EXPECT_LT(own, flat);
}

TEST(Mdl, ValidationRejectsWrongParadigm) {
  try {
    mdl::ProgramModel model(mdl::parse(kRw), ParadigmKind::decision(), "rw");
    FAIL() << "bound to decision data";
  } catch (const Error& e) {
    SUCCEED() << e.what();
  }
}

TEST(Library, ShippedFilesMatchEmbeddedSources) {
  for (const auto& [name, source] : shipped_models()) {
    std::ifstream in(std::string(COGMOD_SOURCE_DIR) + "/models/" + name + ".mdl", std::ios::binary);
    ASSERT_TRUE(in) << name;
    std::ostringstream text;
    text << in.rdbuf();
    EXPECT_EQ(text.str(), source) << name;
  }
  EXPECT_EQ(shipped_models().size(), 7u);
}
