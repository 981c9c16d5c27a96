#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cogmod/error.hpp"
#include "cogmod/baselines.hpp"
#include "cogmod/pipeline.hpp"
#include "cogmod/synthgen.hpp"

using namespace cogmod;
using namespace cogmod::pipeline;

namespace {

const char* kRwBlock = "params {\n  lr: [0, 1]\n  beta: [0, 20]\n}\nstate {\n  V = fill(2, 0.5)\n}\n"
                       "trial {\n  choose(action, softmax(V, beta))\n  V[action] += lr * (reward - V[action])\n}\n";

PromptSpec bandit_spec() {
  const auto agents = gen_bandit_agents(BaselineKind::RW, 3, 20, {0.2, 0.8}, 1);
  const auto kind = agents.dataset.kind;
  PromptSpec spec;
  spec.task_description = task_description(kind);
  spec.data_text = to_prompt_text(agents.dataset, 5, 10);
  spec.guardrails = default_guardrails(kind, 3);
  spec.template_source = default_template(kind);
  return spec;
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

const Sleeper kNoSleep = [](std::chrono::milliseconds) {};

}  // namespace

TEST(Prompt, SectionsAppearInFixedOrder) {
  auto spec = bandit_spec();
  spec.feedback = construct_feedback(kRwBlock, 166.02, Metric::BIC, {"beta", "lr"});
  const auto prompt = build_prompt(spec);
  const auto description = prompt.find(kDescriptionOpening);
  const auto data = prompt.find(kDataHeader);
  const auto tmpl = prompt.find(kTemplateHeader);
  const auto feedback = prompt.find(kFeedbackHeader);
  EXPECT_EQ(description, 0u);
  EXPECT_LT(description, data);
  EXPECT_LT(data, tmpl);
  EXPECT_LT(tmpl, feedback);
  EXPECT_NE(prompt.find("Propose 3 new cognitive models"), std::string::npos);
  EXPECT_EQ(build_prompt(spec), prompt);
}

TEST(Prompt, DisabledComponentsAreOmitted) {
  auto spec = bandit_spec();
  spec.enabled.data = false;
  EXPECT_EQ(build_prompt(spec).find("Data from participant"), std::string::npos);
  spec.enabled.feedback = false;
  const auto first = build_prompt(spec);
  spec.feedback = construct_feedback(kRwBlock, 120.0, Metric::BIC, {"beta", "lr"});
  EXPECT_EQ(build_prompt(spec), first);
}

TEST(Prompt, AllDisabledIsAnError) {
  auto spec = bandit_spec();
  for (auto c : {Component::Description, Component::Data, Component::Guardrails, Component::Template,
                 Component::Feedback}) {
    spec.enabled.set(c, false);
  }
  EXPECT_EQ(kind_of([&] { build_prompt(spec); }), ErrorKind::AllComponentsDisabled);
}

TEST(Feedback, CarriesScoreSourceAndNames) {
  const auto text = construct_feedback(kRwBlock, 166.02, Metric::BIC, {"beta", "lr"});
  EXPECT_NE(text.find("166.02"), std::string::npos);
  EXPECT_NE(text.find("BIC"), std::string::npos);
  EXPECT_NE(text.find(kRwBlock), std::string::npos);
  EXPECT_NE(text.find("beta, lr"), std::string::npos);
  EXPECT_TRUE(construct_feedback(kRwBlock, 166.02, Metric::BIC, {}).empty());
  const auto aic = construct_feedback(kRwBlock, 160.0, Metric::AIC, {"beta"});
  EXPECT_NE(aic.find("AIC = 160.00"), std::string::npos);
}

TEST(Candidates, ThreeValidBlocks) {
  const auto response = format_response({bandit_ladder()[2].render(1), bandit_ladder()[3].render(2),
                                         bandit_ladder()[4].render(3)});
  const auto c = extract_candidates(response, ParadigmKind::learning(Feedback::Partial), {});
  ASSERT_EQ(c.size(), 3u);
  for (const auto& x : c) EXPECT_TRUE(x.accepted()) << x.error;
  EXPECT_EQ(c[0].index, 1);
  EXPECT_EQ(c[2].index, 3);
}

TEST(Candidates, HistoryDuplicatesAndSyntaxErrorsAreRecorded) {
  const auto kind = ParadigmKind::learning(Feedback::Partial);
  const std::vector<std::set<std::string>> history{{"lr", "beta"}};
  const auto response = format_response({"params {\n  L_R: [0, 1]\n  Beta: [0, 20]\n}\nstate {\n  V = fill(2, 0.5)\n}\n"
                                         "trial {\n  choose(action, softmax(V, Beta))\n"
                                         "  V[action] += L_R * (reward - V[action])\n}\n",
                                         "params {\n  x: [0, 1\n}\n"});
  const auto c = extract_candidates(response, kind, history);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].error_kind, ErrorKind::DuplicateParameterSet);
  EXPECT_EQ(c[1].error_kind, ErrorKind::SyntaxError);
  EXPECT_NE(c[1].error.find("line"), std::string::npos);
  EXPECT_EQ(kind_of([&] { extract_candidates("no code here", kind, {}); }), ErrorKind::NoBlocksFound);
}

TEST(Candidates, OverlapRuleIsStricter) {
  const auto kind = ParadigmKind::learning(Feedback::Partial);
  const auto response = format_response({bandit_ladder()[3].render(7)});
  const std::vector<std::set<std::string>> history{{canonical_name("temp_7")}};
  EXPECT_TRUE(extract_candidates(response, kind, history, Distinctness::IdenticalSet)[0].accepted());
  EXPECT_FALSE(extract_candidates(response, kind, history, Distinctness::AnyOverlap)[0].accepted());
}

TEST(Engines, CannedEngineIsKeyedByPrompt) {
  CannedEngine engine({"one", "two", "three"});
  const auto a = engine.complete({"prompt A"});
  EXPECT_EQ(engine.complete({"prompt A"}), a);
  engine.pin("prompt B", "pinned");
  EXPECT_EQ(engine.complete({"prompt B"}), "pinned");
}

TEST(Engines, BlankReplyIsEmptyResponse) {
  ScriptedEngine engine({"  \n"});
  EXPECT_EQ(kind_of([&] { propose("p", engine, 0.2, {}, kNoSleep); }), ErrorKind::EmptyResponse);
}

TEST(Engines, HttpRetriesRateLimitWithBackoff) {
  httplib::Server server;
  std::atomic<int> calls{0};
  std::string auth;
  nlohmann::json body;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (++calls <= 3) {
      res.status = 429;
      return;
    }
    auth = req.get_header_value("Authorization");
    body = nlohmann::json::parse(req.body);
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"hello"}}]})", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("COGMOD_TEST_KEY", "secret", 1);
  HttpEngineConfig config;
  config.base_url = "http://127.0.0.1:" + std::to_string(port);
  config.model = "local";
  config.api_key_env = "COGMOD_TEST_KEY";
  HttpEngine engine(config);
  std::vector<long long> delays;
  const Sleeper record = [&](std::chrono::milliseconds d) { delays.push_back(d.count()); };
  const auto text = propose("hi", engine, 0.15, {}, record);
  server.stop();
  thread.join();

  EXPECT_EQ(text, "hello");
  EXPECT_EQ(calls.load(), 4);
  EXPECT_EQ(delays, (std::vector<long long>{1000, 2000, 4000}));
  EXPECT_EQ(auth, "Bearer secret");
  EXPECT_EQ(body["model"], "local");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.15);
  EXPECT_EQ(body["messages"][0]["content"], "hi");
}

TEST(Engines, UnreachableEndpointGivesUp) {
  HttpEngineConfig config;
  config.base_url = "http://127.0.0.1:1";
  HttpEngine engine(config);
  int sleeps = 0;
  const Sleeper count = [&](std::chrono::milliseconds) { ++sleeps; };
  RetryPolicy policy;
  policy.retries = 2;
  EXPECT_EQ(kind_of([&] { propose("hi", engine, 0.2, policy, count); }), ErrorKind::EngineUnreachable);
  EXPECT_EQ(sleeps, 2);
}

TEST(Engines, PresetTemperatures) {
  EXPECT_DOUBLE_EQ(default_temperature(parse_preset("llama")), 0.2);
  EXPECT_DOUBLE_EQ(default_temperature(parse_preset("qwen")), 0.15);
  EXPECT_DOUBLE_EQ(default_temperature(parse_preset("r1")), 0.1);
}

TEST(Engines, AdaptiveMockClimbsWithFeedback) {
  AdaptiveMockEngine engine(bandit_ladder(), 3);
  const auto first = engine.complete({"Plain request without sections."});
  const auto blocks = fenced_blocks(first);
  ASSERT_EQ(blocks.size(), 3u);
  // Without description, data or template the engine stays on the bottom rung.
  for (const auto& b : blocks) EXPECT_NE(b.source.find("bias_"), std::string::npos);
  const auto feedback = construct_feedback(blocks[0].source, 200.0, Metric::BIC, {"bias_1"});
  const auto second = fenced_blocks(engine.complete({feedback}));
  ASSERT_EQ(second.size(), 3u);
  EXPECT_NE(second[0].source.find("stay_"), std::string::npos);
  EXPECT_NE(second[1].source.find("lr_"), std::string::npos);
}

namespace {

RunConfig small_config() {
  BanditTask task;
  task.feedback = Feedback::Full;
  RunConfig config;
  config.dataset = gen_agents(BaselineKind::RWPlusMinus, task, 10, 60, 2).dataset;
  config.iterations = 3;
  config.fit.restarts = 1;
  config.fit.max_evaluations = 300;
  config.mc_samples = 2'000;
  config.sleeper = kNoSleep;
  config.baselines = {BaselineKind::RW};
  return config;
}

}  // namespace

TEST(Run, UnparseableOutputAbortsFirstIteration) {
  auto config = small_config();
  ScriptedEngine engine({"I cannot help with that."});
  try {
    run(config, engine);
    FAIL() << "run completed";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RunAborted);
    EXPECT_NE(std::string(e.what()).find("iteration 1"), std::string::npos);
  }
  EXPECT_EQ(engine.calls(), 3u);
}

TEST(Run, ShortScriptedRunIsConsistentAndArchived) {
  auto config = small_config();
  ScriptedEngine engine(progressive_bandit_script(3));
  const auto r = run(config, engine);
  ASSERT_EQ(r.iterations.size(), 3u);
  EXPECT_TRUE(r.iterations[0].feedback_sent.empty());
  EXPECT_FALSE(r.iterations[1].feedback_sent.empty());
  for (std::size_t i = 1; i < r.iterations.size(); ++i) {
    EXPECT_LE(r.iterations[i].best_score, r.iterations[i - 1].best_score);
  }
  EXPECT_EQ(r.test_fits.size(), r.test_ids.size());
  EXPECT_EQ(r.comparison.models, (std::vector<std::string>{"best", "rw"}));
  const auto parts = split(config.dataset, config.split);
  EXPECT_TRUE(prompt_leaks(r.prompts(), parts.test, config.prompt_trials).empty());
  EXPECT_FALSE(prompt_leaks({to_prompt_text(parts.test, 10, config.prompt_trials)}, parts.test, config.prompt_trials)
                   .empty());

  const auto dir = std::filesystem::temp_directory_path() / "cogmod_archive_test";
  std::filesystem::remove_all(dir);
  write_archive(r, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "prompts" / "01.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "responses" / "03.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "candidates" / "02_3.mdl"));
  EXPECT_TRUE(std::filesystem::exists(dir / "fits.jsonl"));
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  std::filesystem::remove_all(dir);
}

TEST(Run, RunManyUsesDistinctSeeds) {
  auto config = small_config();
  config.iterations = 1;
  const EngineFactory factory = [](std::uint64_t seed) {
    return std::make_unique<AdaptiveMockEngine>(bandit_ladder(), seed);
  };
  const auto runs = run_many(config, 2, factory);
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[0].run_id, "run_01");
  EXPECT_EQ(runs[1].run_id, "run_02");
}

TEST(Ablate, NothingAblatedMatchesFullRun) {
  auto config = small_config();
  config.iterations = 2;
  const EngineFactory factory = [](std::uint64_t seed) {
    return std::make_unique<AdaptiveMockEngine>(bandit_ladder(), seed);
  };
  const auto report = ablate(config, {"none"}, factory);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_DOUBLE_EQ(report.rows[0].mean_test_score, report.full_mean_test_score);
  for (double d : report.rows[0].deltas) EXPECT_DOUBLE_EQ(d, 0.0);
}

TEST(Config, ParsesAndRejectsUnknownKeys) {
  const auto dir = std::filesystem::temp_directory_path() / "cogmod_config_test";
  std::filesystem::create_directories(dir);
  const auto data = gen_bandit_agents(BaselineKind::RW, 5, 20, {0.2, 0.8}, 1).dataset;
  save_dataset(data, dir / "data.csv", DataFormat::Csv);
  const auto config = parse_pipeline_config(R"({
    "dataset": {"path": "data.csv", "kind": "learning-partial"},
    "metric": "aic", "iterations": 4, "seed": 9,
    "components": {"feedback": false},
    "engine": {"type": "adaptive", "preset": "qwen"},
    "baselines": ["rw", "rwk"]
  })", dir);
  EXPECT_EQ(config.run.metric, Metric::AIC);
  EXPECT_EQ(config.run.iterations, 4);
  EXPECT_FALSE(config.run.components.feedback);
  EXPECT_DOUBLE_EQ(config.run.temperature, 0.15);
  EXPECT_EQ(config.run.dataset.participants.size(), 5u);
  EXPECT_EQ(config.run.baselines.size(), 2u);
  EXPECT_EQ(kind_of([&] {
              parse_pipeline_config(R"({"dataset": {"path": "data.csv", "kind": "learning-partial"}, "iteratons": 2})",
                                    dir);
            }),
            ErrorKind::ConfigError);
  std::filesystem::remove_all(dir);
}
