#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "cogmod/dataset.hpp"
#include "cogmod/error.hpp"

using namespace cogmod;

namespace {

Dataset learning_dataset(std::size_t n_participants, Feedback feedback = Feedback::Partial) {
  Dataset d;
  d.kind = ParadigmKind::learning(feedback);
  for (std::size_t i = 0; i < n_participants; ++i) {
    ParticipantData p{"p" + std::to_string(i), {}};
    for (int t = 0; t < 4; ++t) {
      LearningTrial trial{0, t % 2, t % 3 == 0 ? 1 : 0, std::nullopt};
      if (feedback == Feedback::Full) trial.forgone_reward = 1 - trial.reward;
      p.trials.emplace_back(trial);
    }
    d.participants.push_back(std::move(p));
  }
  return d;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ConfigError;
}

}  // namespace

TEST(Dataset, WorkingMemoryRowParses) {
  const auto d = parse_csv("participant,block,set_size,trial,stimulus,action,reward\np1,0,3,0,0,0,1\n",
                           ParadigmKind::working_memory());
  ASSERT_EQ(d.participants.size(), 1u);
  const auto& t = std::get<MemoryTrial>(d.participants[0].trials[0]);
  EXPECT_EQ(t, (MemoryTrial{0, 3, 0, 0, 1}));
}

TEST(Dataset, HeaderWithoutRowsIsEmpty) {
  EXPECT_EQ(kind_of([] { parse_csv("participant,block,trial,action,reward\n", ParadigmKind::learning(Feedback::Partial)); }),
            ErrorKind::EmptyDataset);
}

TEST(Dataset, FullFeedbackNeedsForgoneColumn) {
  EXPECT_EQ(kind_of([] {
              parse_csv("participant,block,trial,action,reward\np1,0,0,1,1\n", ParadigmKind::learning(Feedback::Full));
            }),
            ErrorKind::SchemaMismatch);
}

TEST(Dataset, CsvAndJsonRoundTrip) {
  const auto d = learning_dataset(3, Feedback::Full);
  EXPECT_EQ(parse_csv(to_csv(d), d.kind).participants, d.participants);
  EXPECT_EQ(parse_json(to_json(d), d.kind).participants, d.participants);
}

TEST(Split, SizesFollowFractionsAndPartsAreDisjoint) {
  const auto d = learning_dataset(10);
  const auto s = split(d, {0.2, 0.4, 0.4, 7});
  EXPECT_EQ(s.prompt.participants.size(), 2u);
  EXPECT_EQ(s.validation.participants.size(), 4u);
  EXPECT_EQ(s.test.participants.size(), 4u);
  std::set<std::string> ids;
  for (const auto* part : {&s.prompt, &s.validation, &s.test}) {
    for (const auto& p : part->participants) EXPECT_TRUE(ids.insert(p.participant_id).second);
  }
  EXPECT_EQ(ids.size(), 10u);
}

TEST(Split, IsDeterministic) {
  const auto d = learning_dataset(10);
  const auto a = split(d, {0.2, 0.4, 0.4, 7});
  const auto b = split(d, {0.2, 0.4, 0.4, 7});
  EXPECT_EQ(a.prompt, b.prompt);
  EXPECT_EQ(a.validation, b.validation);
  EXPECT_EQ(a.test, b.test);
}

TEST(Split, TwoParticipantsCannotFillThreeParts) {
  EXPECT_EQ(kind_of([] { split(learning_dataset(2), {0.2, 0.4, 0.4, 0}); }), ErrorKind::TooFewParticipants);
}

TEST(PromptText, FullFeedbackLine) {
  ParticipantData p{"x", {LearningTrial{1, 1, -1, 1}}};
  const auto lines = prompt_lines(p, ParadigmKind::learning(Feedback::Full), 10);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0],
            "Block: 1, Trial: 1, Chosen action: 1, Reward for the chosen action: -1, Reward for the unchosen action: 1");
}

TEST(PromptText, DecisionLine) {
  ParticipantData p{"x", {DecisionTrial{{1, 1, 1, 1}, {0, 0, 1, 1}, {0.9, 0.8, 0.7, 0.6}, 0}}};
  const auto lines = prompt_lines(p, ParadigmKind::decision(), 10);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0], "Trial 1: Product A ratings: [1 1 1 1]. Product B ratings: [0 0 1 1]. Chosen option: A");
}

TEST(PromptText, ZeroTrialsKeepsOnlyHeaders) {
  const auto d = learning_dataset(2);
  const auto text = to_prompt_text(d, 5, 0);
  EXPECT_NE(text.find("Data from participant 1:"), std::string::npos);
  EXPECT_EQ(text.find("Trial"), std::string::npos);
  EXPECT_EQ(text.find("p0"), std::string::npos);
}
