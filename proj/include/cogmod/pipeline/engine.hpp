#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace cogmod::pipeline {

struct EngineRequest {
  std::string prompt;
  double temperature = 0.2;
  int max_tokens = 4096;
};

/// Source of candidate programs. Transient transport problems are reported
/// as Error(EngineUnreachable) or Error(RateLimited); `propose` retries those.
class ProposalEngine {
 public:
  virtual ~ProposalEngine() = default;
  virtual std::string complete(const EngineRequest& request) = 0;
  virtual std::string name() const = 0;
};

enum class EnginePreset { Llama, Qwen, R1 };

/// 0.2, 0.15 and 0.1 respectively.
double default_temperature(EnginePreset preset) noexcept;
EnginePreset parse_preset(std::string_view text);

struct HttpEngineConfig {
  std::string base_url = "http://localhost:8000";
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env = "COGMOD_API_KEY";
  int timeout_seconds = 300;
};

/// Chat-completions client: POSTs {model, messages, temperature, max_tokens}
/// and returns choices[0].message.content. The bearer token is read from the
/// environment variable named in the config, if set.
class HttpEngine final : public ProposalEngine {
 public:
  explicit HttpEngine(HttpEngineConfig config);
  std::string complete(const EngineRequest& request) override;
  std::string name() const override { return "http:" + config_.model; }

 private:
  HttpEngineConfig config_;
};

/// Deterministic stand-in: the response is picked by hashing the prompt.
/// Exact prompt hashes can be pinned with `pin`.
class CannedEngine final : public ProposalEngine {
 public:
  explicit CannedEngine(std::vector<std::string> responses);
  void pin(std::string_view prompt, std::string response);
  std::string complete(const EngineRequest& request) override;
  std::string name() const override { return "canned"; }

 private:
  std::vector<std::string> responses_;
  std::map<std::uint64_t, std::string> pinned_;
};

/// Returns the scripted responses in order, one per call; the last one repeats.
class ScriptedEngine final : public ProposalEngine {
 public:
  explicit ScriptedEngine(std::vector<std::string> script);
  std::string complete(const EngineRequest& request) override;
  std::string name() const override { return "scripted"; }
  std::size_t calls() const noexcept { return calls_; }

 private:
  std::vector<std::string> script_;
  std::size_t calls_ = 0;
};

/// A model family of increasing quality. `render(variant)` writes the rung's
/// program with parameter names suffixed by `variant`, so every emission has
/// a fresh parameter set.
struct LadderRung {
  std::string label;
  std::function<std::string(int variant)> render;
};

/// Rungs for two-armed bandit data, worst to best for data from agents with
/// separate positive and negative learning rates: bias, win-stay/lose-shift,
/// RW, RW with stickiness, RW with two learning rates.
std::vector<LadderRung> bandit_ladder();

/// Four learning rates (chosen/unchosen by sign) plus stickiness; needs
/// full-feedback data.
LadderRung four_rate_rung();

/// One response per iteration for full-feedback bandit data: weaker models
/// first, then the two-rate delta rule, then over-parameterised four-rate
/// variants that should not beat it. Every parameter set is unique.
std::vector<std::string> progressive_bandit_script(int iterations = 10);

/// Mock engine whose output quality depends on the prompt. Without feedback
/// it proposes rungs uniformly at random up to a cap equal to the number of
/// enabled description, data and template sections. When the prompt carries
/// feedback naming one of its own earlier programs, it proposes the rungs
/// just above that program's rung.
class AdaptiveMockEngine final : public ProposalEngine {
 public:
  AdaptiveMockEngine(std::vector<LadderRung> ladder, std::uint64_t seed, std::size_t n_candidates = 3);
  std::string complete(const EngineRequest& request) override;
  std::string name() const override { return "adaptive-mock"; }

 private:
  std::vector<LadderRung> ladder_;
  std::uint64_t seed_;
  std::size_t n_candidates_;
  std::size_t calls_ = 0;
  int next_variant_ = 1;
  std::vector<std::pair<std::string, int>> emitted_;  // program source, rung
};

/// Formats candidate sources as a response with tagged fenced blocks.
std::string format_response(const std::vector<std::string>& sources, std::string_view preamble = {});

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct RetryPolicy {
  int retries = 3;  // extra calls after the first one
  std::chrono::milliseconds initial_delay{1000};
  double factor = 2.0;
};

/// Calls the engine, retrying transient failures with exponential backoff.
/// Throws EngineUnreachable / RateLimited once the retries run out and
/// EmptyResponse for a blank reply.
std::string propose(const std::string& prompt, ProposalEngine& engine, double temperature,
                    const RetryPolicy& policy = {}, const Sleeper& sleep = {});

}  // namespace cogmod::pipeline
