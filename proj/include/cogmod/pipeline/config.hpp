#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cogmod/pipeline/engine.hpp"
#include "cogmod/pipeline/run.hpp"

namespace cogmod::pipeline {

struct EngineSpec {
  /// "http", "scripted", "canned", "adaptive" or "progressive".
  std::string type = "http";
  HttpEngineConfig http;
  std::vector<std::filesystem::path> responses;  // scripted and canned engines
};

struct PipelineConfig {
  RunConfig run;
  EngineSpec engine;
  std::size_t runs = 1;
  std::vector<std::string> ablations;
};

/// Reads a JSON pipeline configuration. Relative paths are resolved against
/// the file's directory. Unknown keys are rejected with ConfigError.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
PipelineConfig parse_pipeline_config(std::string_view text, const std::filesystem::path& base_dir);

EngineFactory engine_factory(const EngineSpec& spec, std::size_t n_candidates);

}  // namespace cogmod::pipeline
