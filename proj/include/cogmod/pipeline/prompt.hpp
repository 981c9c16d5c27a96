#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cogmod/dataset.hpp"
#include "cogmod/fitting.hpp"

namespace cogmod::pipeline {

enum class Component { Description, Data, Guardrails, Template, Feedback };

std::string_view to_string(Component c) noexcept;
/// Accepts "description", "data", "guardrails", "template", "feedback".
Component parse_component(std::string_view text);

struct PromptComponents {
  bool description = true;
  bool data = true;
  bool guardrails = true;
  bool model_template = true;
  bool feedback = true;

  bool enabled(Component c) const noexcept;
  void set(Component c, bool on) noexcept;
  bool any() const noexcept { return description || data || guardrails || model_template || feedback; }

  friend bool operator==(const PromptComponents&, const PromptComponents&) = default;
};

struct PromptSpec {
  std::string task_description;
  std::string data_text;
  std::string guardrails;
  std::string template_source;
  std::optional<std::string> feedback;
  PromptComponents enabled;
  std::size_t n_candidates = 3;
};

inline constexpr std::string_view kDataHeader = "Here is a task data set from several participants:";
inline constexpr std::string_view kFeedbackHeader = "Best model so far";
inline constexpr std::string_view kTemplateHeader = "Here is an example model written in MDL:";
inline constexpr std::string_view kDescriptionOpening = "In this task";

/// Sections in fixed order (description, data, guardrails, template,
/// feedback) followed by the closing request. Disabled or empty sections
/// are omitted whole. Throws AllComponentsDisabled.
std::string build_prompt(const PromptSpec& spec);

/// Plain-language description of each paradigm.
std::string task_description(ParadigmKind kind);

/// MDL syntax reference plus the response format (fenced blocks tagged `mdl modelK`).
std::string default_guardrails(ParadigmKind kind, std::size_t n_candidates);

/// Example program shown to the engine as a starting point.
std::string default_template(ParadigmKind kind);

/// Empty when there is nothing to report yet (no used names); otherwise the
/// best model's source, its score under `metric` and the used-name list.
std::string construct_feedback(std::string_view best_source, double best_score, Metric metric,
                               const std::vector<std::string>& used_names);

}  // namespace cogmod::pipeline
