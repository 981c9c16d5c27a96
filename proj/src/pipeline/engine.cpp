#include "cogmod/pipeline/engine.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cogmod/error.hpp"
#include "cogmod/pipeline/prompt.hpp"
#include "cogmod/random.hpp"

namespace cogmod::pipeline {

double default_temperature(EnginePreset preset) noexcept {
  switch (preset) {
    case EnginePreset::Llama: return 0.2;
    case EnginePreset::Qwen: return 0.15;
    case EnginePreset::R1: return 0.1;
  }
  return 0.2;
}

EnginePreset parse_preset(std::string_view text) {
  if (text == "llama") return EnginePreset::Llama;
  if (text == "qwen") return EnginePreset::Qwen;
  if (text == "r1") return EnginePreset::R1;
  throw Error(ErrorKind::ConfigError, fmt::format("unknown engine preset '{}'", text));
}

HttpEngine::HttpEngine(HttpEngineConfig config) : config_(std::move(config)) {}

std::string HttpEngine::complete(const EngineRequest& request) {
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(10);
  client.set_read_timeout(config_.timeout_seconds);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", fmt::format("Bearer {}", key));
  }
  const nlohmann::json body{{"model", config_.model},
                            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
                            {"temperature", request.temperature},
                            {"max_tokens", request.max_tokens}};
  auto res = client.Post(config_.path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::EngineUnreachable,
                fmt::format("{}{}: {}", config_.base_url, config_.path, httplib::to_string(res.error())));
  }
  if (res->status == 429) throw Error(ErrorKind::RateLimited, "the endpoint returned 429");
  if (res->status >= 500) throw Error(ErrorKind::EngineUnreachable, fmt::format("the endpoint returned {}", res->status));
  if (res->status != 200) {
    throw Error(ErrorKind::ConfigError, fmt::format("the endpoint rejected the request with status {}", res->status));
  }
  const auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) throw Error(ErrorKind::SchemaMismatch, "the endpoint did not return JSON");
  try {
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaMismatch, fmt::format("unexpected completion payload: {}", e.what()));
  }
}

CannedEngine::CannedEngine(std::vector<std::string> responses) : responses_(std::move(responses)) {}

void CannedEngine::pin(std::string_view prompt, std::string response) { pinned_[fnv1a(prompt)] = std::move(response); }

std::string CannedEngine::complete(const EngineRequest& request) {
  const auto h = fnv1a(request.prompt);
  if (auto it = pinned_.find(h); it != pinned_.end()) return it->second;
  if (responses_.empty()) return {};
  return responses_[h % responses_.size()];
}

ScriptedEngine::ScriptedEngine(std::vector<std::string> script) : script_(std::move(script)) {}

std::string ScriptedEngine::complete(const EngineRequest&) {
  if (script_.empty()) return {};
  const auto i = std::min(calls_, script_.size() - 1);
  ++calls_;
  return script_[i];
}

std::vector<LadderRung> bandit_ladder() {
  std::vector<LadderRung> ladder;
  ladder.push_back({"bias", [](int v) {
                      return fmt::format(
                          "params {{\n  bias_{0}: [-5, 5]\n}}\ntrial {{\n  p_one = sigmoid(bias_{0})\n"
                          "  choose(action, [1 - p_one, p_one])\n}}\n",
                          v);
                    }});
  ladder.push_back({"win-stay lose-shift", [](int v) {
                      return fmt::format(
                          "params {{\n  stay_{0}: [0, 1]\n}}\nstate {{\n  prev = -1\n  prev_reward = 0\n}}\ntrial {{\n"
                          "  p = fill(2, 0.5)\n  if prev >= 0 {{\n    if prev_reward > 0 {{\n      p = fill(2, 1 - stay_{0})\n"
                          "      p[prev] = stay_{0}\n    }} else {{\n      p = fill(2, stay_{0})\n"
                          "      p[prev] = 1 - stay_{0}\n    }}\n  }}\n  choose(action, p)\n  prev = action\n"
                          "  prev_reward = reward\n}}\n",
                          v);
                    }});
  ladder.push_back({"delta rule", [](int v) {
                      return fmt::format(
                          "params {{\n  lr_{0}: [0, 1]\n  temp_{0}: [0, 20]\n}}\nstate {{\n  V = fill(2, 0.5)\n}}\n"
                          "trial {{\n  choose(action, softmax(V, temp_{0}))\n  V[action] += lr_{0} * (reward - V[action])\n}}\n",
                          v);
                    }});
  ladder.push_back({"delta rule with stickiness", [](int v) {
                      return fmt::format(
                          "params {{\n  lr_{0}: [0, 1]\n  temp_{0}: [0, 20]\n  stick_{0}: [-2, 2]\n}}\n"
                          "state {{\n  V = fill(2, 0.5)\n  prev = -1\n}}\ntrial {{\n  logits = temp_{0} * V\n"
                          "  if prev >= 0 {{\n    logits[prev] += stick_{0}\n  }}\n  choose(action, softmax(logits))\n"
                          "  V[action] += lr_{0} * (reward - V[action])\n  prev = action\n}}\n",
                          v);
                    }});
  ladder.push_back({"delta rule with valence-specific rates", [](int v) {
                      return fmt::format(
                          "params {{\n  lr_gain_{0}: [0, 1]\n  lr_loss_{0}: [0, 1]\n  temp_{0}: [0, 20]\n}}\n"
                          "state {{\n  V = fill(2, 0.5)\n}}\ntrial {{\n  choose(action, softmax(V, temp_{0}))\n"
                          "  delta = reward - V[action]\n  if delta >= 0 {{\n    V[action] += lr_gain_{0} * delta\n"
                          "  }} else {{\n    V[action] += lr_loss_{0} * delta\n  }}\n}}\n",
                          v);
                    }});
  return ladder;
}

LadderRung four_rate_rung() {
  return {"delta rule with four rates", [](int v) {
            return fmt::format(
                "params {{\n  lr_cp_{0}: [0, 1]\n  lr_cn_{0}: [0, 1]\n  lr_up_{0}: [0, 1]\n  lr_un_{0}: [0, 1]\n"
                "  temp_{0}: [0, 20]\n  stick_{0}: [-2, 2]\n}}\nstate {{\n  V = fill(2, 0.5)\n  prev = -1\n}}\n"
                "trial {{\n  logits = temp_{0} * V\n  if prev >= 0 {{\n    logits[prev] += stick_{0}\n  }}\n"
                "  choose(action, softmax(logits))\n  other = 1 - action\n  delta = reward - V[action]\n"
                "  if delta >= 0 {{\n    V[action] += lr_cp_{0} * delta\n  }} else {{\n"
                "    V[action] += lr_cn_{0} * delta\n  }}\n  delta_u = forgone_reward - V[other]\n"
                "  if delta_u >= 0 {{\n    V[other] += lr_up_{0} * delta_u\n  }} else {{\n"
                "    V[other] += lr_un_{0} * delta_u\n  }}\n  prev = action\n}}\n",
                v);
          }};
}

std::vector<std::string> progressive_bandit_script(int iterations) {
  auto ladder = bandit_ladder();
  ladder.push_back(four_rate_rung());
  enum Rung { Bias, Wsls, Rw, RwSticky, RwTwoRates, FourRates };
  const std::vector<std::vector<int>> plan{
      {Bias, Wsls, Rw},      {Wsls, Rw, RwSticky},     {Rw, RwSticky, RwTwoRates},
      {FourRates, Rw, RwSticky}, {Wsls, RwSticky, RwTwoRates}, {Bias, Rw, RwTwoRates}};
  std::vector<std::string> script;
  int variant = 1;
  for (int i = 0; i < iterations; ++i) {
    const auto step = static_cast<std::size_t>(i);
    const auto& rungs = plan[step < 3 ? step : 3 + (step - 3) % 3];
    std::vector<std::string> sources;
    for (int r : rungs) sources.push_back(ladder[static_cast<std::size_t>(r)].render(variant++));
    script.push_back(format_response(sources, fmt::format("Proposals for round {}.", i + 1)));
  }
  return script;
}

AdaptiveMockEngine::AdaptiveMockEngine(std::vector<LadderRung> ladder, std::uint64_t seed, std::size_t n_candidates)
    : ladder_(std::move(ladder)), seed_(seed), n_candidates_(n_candidates) {
  if (ladder_.empty()) throw Error(ErrorKind::ConfigError, "the mock engine needs at least one rung");
}

std::string AdaptiveMockEngine::complete(const EngineRequest& request) {
  Rng rng(derive_seed(seed_, calls_++));
  const std::string& prompt = request.prompt;
  const int top = static_cast<int>(ladder_.size()) - 1;
  std::optional<int> best_rung;
  if (prompt.find(kFeedbackHeader) != std::string::npos) {
    for (auto it = emitted_.rbegin(); it != emitted_.rend(); ++it) {
      if (prompt.find(it->first) != std::string::npos) {
        best_rung = it->second;
        break;
      }
    }
  }
  const int cap = std::min(top, static_cast<int>(prompt.starts_with(kDescriptionOpening)) +
                                    static_cast<int>(prompt.find(kDataHeader) != std::string::npos) +
                                    static_cast<int>(prompt.find(kTemplateHeader) != std::string::npos));
  std::vector<std::string> sources;
  for (std::size_t i = 0; i < n_candidates_; ++i) {
    const int rung = best_rung ? std::min(top, *best_rung + 1 + static_cast<int>(i))
                               : static_cast<int>(rng.index(static_cast<std::size_t>(cap) + 1));
    sources.push_back(ladder_[static_cast<std::size_t>(rung)].render(next_variant_++));
    emitted_.emplace_back(sources.back(), rung);
  }
  return format_response(sources, "Here are the proposed models.");
}

std::string format_response(const std::vector<std::string>& sources, std::string_view preamble) {
  std::string out(preamble);
  if (!out.empty()) out += "\n\n";
  for (std::size_t k = 0; k < sources.size(); ++k) {
    std::string src = sources[k];
    if (!src.empty() && src.back() != '\n') src += '\n';
    out += fmt::format("```mdl model{}\n{}```\n\n", k + 1, src);
  }
  return out;
}

std::string propose(const std::string& prompt, ProposalEngine& engine, double temperature, const RetryPolicy& policy,
                    const Sleeper& sleep) {
  auto delay = policy.initial_delay;
  const int attempts = 1 + std::max(0, policy.retries);
  for (int attempt = 1;; ++attempt) {
    try {
      auto text = engine.complete(EngineRequest{prompt, temperature});
      if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
        throw Error(ErrorKind::EmptyResponse, fmt::format("{} returned an empty response", engine.name()));
      }
      return text;
    } catch (const Error& e) {
      const bool transient = e.kind() == ErrorKind::EngineUnreachable || e.kind() == ErrorKind::RateLimited;
      if (!transient || attempt >= attempts) throw;
    }
    if (sleep) {
      sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
    delay = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * policy.factor));
  }
}

}  // namespace cogmod::pipeline
