#include "cogmod/pipeline/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cogmod/error.hpp"

namespace cogmod::pipeline {

namespace {

using nlohmann::json;

void check_keys(const json& object, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!object.is_object()) throw Error(ErrorKind::ConfigError, fmt::format("{} must be an object", where));
  for (const auto& [key, _] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorKind::ConfigError, fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

template <typename T>
void read(const json& object, const char* key, T& target) {
  if (!object.contains(key)) return;
  try {
    target = object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, fmt::format("bad value for '{}': {}", key, e.what()));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, fmt::format("cannot read {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view text, const std::filesystem::path& base_dir) {
  const json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) throw Error(ErrorKind::ConfigError, "the configuration is not valid JSON");
  check_keys(root,
             {"dataset", "split", "metric", "iterations", "candidates", "max_retries", "seed", "restarts",
              "max_evaluations", "components", "prompt", "temperature", "distinctness", "baselines", "jobs",
              "mc_samples", "run_id", "runs", "ablate", "engine", "retry"},
             "the configuration");

  PipelineConfig config;
  RunConfig& run = config.run;

  if (!root.contains("dataset")) throw Error(ErrorKind::ConfigError, "'dataset' is required");
  const auto& ds = root.at("dataset");
  check_keys(ds, {"path", "kind", "format"}, "'dataset'");
  std::string path;
  std::string kind;
  read(ds, "path", path);
  read(ds, "kind", kind);
  if (path.empty() || kind.empty()) throw Error(ErrorKind::ConfigError, "'dataset' needs 'path' and 'kind'");
  const auto data_path = resolve(base_dir, path);
  DataFormat format = format_from_path(data_path);
  if (ds.contains("format")) format = ds.at("format").get<std::string>() == "json" ? DataFormat::Json : DataFormat::Csv;
  run.dataset = load_dataset(data_path, parse_paradigm_kind(kind), format);

  if (root.contains("split")) {
    const auto& s = root.at("split");
    check_keys(s, {"prompt", "validation", "test", "seed"}, "'split'");
    read(s, "prompt", run.split.prompt_fraction);
    read(s, "validation", run.split.validation_fraction);
    read(s, "test", run.split.test_fraction);
    read(s, "seed", run.split.seed);
  }
  if (root.contains("metric")) run.metric = parse_metric(root.at("metric").get<std::string>());
  read(root, "iterations", run.iterations);
  read(root, "candidates", run.candidates_per_iteration);
  read(root, "max_retries", run.max_retries);
  read(root, "seed", run.seed);
  read(root, "restarts", run.fit.restarts);
  read(root, "max_evaluations", run.fit.max_evaluations);
  read(root, "jobs", run.jobs);
  read(root, "mc_samples", run.mc_samples);
  read(root, "run_id", run.run_id);
  read(root, "runs", config.runs);
  read(root, "ablate", config.ablations);
  if (root.contains("components")) {
    const auto& c = root.at("components");
    check_keys(c, {"description", "data", "guardrails", "template", "feedback"}, "'components'");
    for (const auto& [key, value] : c.items()) run.components.set(parse_component(key), value.get<bool>());
  }
  if (root.contains("prompt")) {
    const auto& p = root.at("prompt");
    check_keys(p, {"participants", "trials"}, "'prompt'");
    read(p, "participants", run.prompt_participants);
    read(p, "trials", run.prompt_trials);
  }
  if (root.contains("distinctness")) run.distinctness = parse_distinctness(root.at("distinctness").get<std::string>());
  if (root.contains("baselines")) {
    for (const auto& name : root.at("baselines")) run.baselines.push_back(parse_baseline(name.get<std::string>()));
  }
  if (root.contains("retry")) {
    const auto& r = root.at("retry");
    check_keys(r, {"retries", "initial_delay_ms", "factor"}, "'retry'");
    read(r, "retries", run.retry.retries);
    read(r, "factor", run.retry.factor);
    if (r.contains("initial_delay_ms")) run.retry.initial_delay = std::chrono::milliseconds(r.at("initial_delay_ms").get<long>());
  }

  if (root.contains("engine")) {
    const auto& e = root.at("engine");
    check_keys(e, {"type", "base_url", "path", "model", "api_key_env", "timeout_seconds", "preset", "responses"},
               "'engine'");
    read(e, "type", config.engine.type);
    read(e, "base_url", config.engine.http.base_url);
    read(e, "path", config.engine.http.path);
    read(e, "model", config.engine.http.model);
    read(e, "api_key_env", config.engine.http.api_key_env);
    read(e, "timeout_seconds", config.engine.http.timeout_seconds);
    if (e.contains("preset")) run.temperature = default_temperature(parse_preset(e.at("preset").get<std::string>()));
    if (e.contains("responses")) {
      for (const auto& r : e.at("responses")) config.engine.responses.push_back(resolve(base_dir, r.get<std::string>()));
    }
  }
  read(root, "temperature", run.temperature);

  static constexpr std::array<std::string_view, 5> kTypes{"http", "scripted", "canned", "adaptive", "progressive"};
  if (std::find(kTypes.begin(), kTypes.end(), config.engine.type) == kTypes.end()) {
    throw Error(ErrorKind::ConfigError, fmt::format("unknown engine type '{}'", config.engine.type));
  }
  if (run.iterations < 1 || run.candidates_per_iteration < 1 || run.max_retries < 1) {
    throw Error(ErrorKind::ConfigError, "iterations, candidates and max_retries must be positive");
  }
  return config;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  return parse_pipeline_config(read_file(path), path.parent_path());
}

EngineFactory engine_factory(const EngineSpec& spec, std::size_t n_candidates) {
  if (spec.type == "http") {
    return [http = spec.http](std::uint64_t) { return std::make_unique<HttpEngine>(http); };
  }
  if (spec.type == "adaptive") {
    return [n_candidates](std::uint64_t seed) {
      return std::make_unique<AdaptiveMockEngine>(bandit_ladder(), seed, n_candidates);
    };
  }
  if (spec.type == "progressive") {
    return [](std::uint64_t) { return std::make_unique<ScriptedEngine>(progressive_bandit_script()); };
  }
  std::vector<std::string> texts;
  for (const auto& p : spec.responses) texts.push_back(read_file(p));
  if (texts.empty()) throw Error(ErrorKind::ConfigError, fmt::format("the {} engine needs 'responses'", spec.type));
  if (spec.type == "scripted") {
    return [texts](std::uint64_t) { return std::make_unique<ScriptedEngine>(texts); };
  }
  if (spec.type == "canned") {
    return [texts](std::uint64_t) { return std::make_unique<CannedEngine>(texts); };
  }
  throw Error(ErrorKind::ConfigError, fmt::format("unknown engine type '{}'", spec.type));
}

}  // namespace cogmod::pipeline
