#include "cogmod/pipeline/prompt.hpp"

#include <cctype>

#include <fmt/format.h>

#include "cogmod/error.hpp"

namespace cogmod::pipeline {

std::string_view to_string(Component c) noexcept {
  switch (c) {
    case Component::Description: return "description";
    case Component::Data: return "data";
    case Component::Guardrails: return "guardrails";
    case Component::Template: return "template";
    case Component::Feedback: return "feedback";
  }
  return "";
}

Component parse_component(std::string_view text) {
  for (auto c : {Component::Description, Component::Data, Component::Guardrails, Component::Template, Component::Feedback}) {
    if (to_string(c) == text) return c;
  }
  throw Error(ErrorKind::ConfigError, fmt::format("unknown prompt component '{}'", text));
}

bool PromptComponents::enabled(Component c) const noexcept {
  switch (c) {
    case Component::Description: return description;
    case Component::Data: return data;
    case Component::Guardrails: return guardrails;
    case Component::Template: return model_template;
    case Component::Feedback: return feedback;
  }
  return false;
}

void PromptComponents::set(Component c, bool on) noexcept {
  switch (c) {
    case Component::Description: description = on; break;
    case Component::Data: data = on; break;
    case Component::Guardrails: guardrails = on; break;
    case Component::Template: model_template = on; break;
    case Component::Feedback: feedback = on; break;
  }
}

std::string build_prompt(const PromptSpec& spec) {
  if (!spec.enabled.any()) throw Error(ErrorKind::AllComponentsDisabled, "every prompt component is disabled");
  std::vector<std::string> sections;
  if (spec.enabled.description && !spec.task_description.empty()) sections.push_back(spec.task_description);
  if (spec.enabled.data && !spec.data_text.empty()) sections.push_back(fmt::format("{}\n\n{}", kDataHeader, spec.data_text));
  if (spec.enabled.guardrails && !spec.guardrails.empty()) sections.push_back(spec.guardrails);
  if (spec.enabled.model_template && !spec.template_source.empty()) {
    sections.push_back(fmt::format("{}\n\n```mdl\n{}```", kTemplateHeader, spec.template_source));
  }
  if (spec.enabled.feedback && spec.feedback && !spec.feedback->empty()) sections.push_back(*spec.feedback);
  sections.push_back(fmt::format(
      "Propose {} new cognitive models that could explain how the participants behave. "
      "Each model must use a different set of parameter names.",
      spec.n_candidates));
  std::string out;
  for (const auto& s : sections) {
    if (!out.empty()) out += "\n\n";
    out += s;
    while (!out.empty() && out.back() == '\n') out.pop_back();
  }
  out += '\n';
  return out;
}

std::string task_description(ParadigmKind kind) {
  switch (kind.paradigm) {
    case Paradigm::DecisionMaking:
      return "In this task participants repeatedly choose between two products, A and B. Each product is described "
             "by expert ratings on several features, and the features differ in how well they predict quality. "
             "On every trial the participant picks the product they believe is better.";
    case Paradigm::Learning:
      return fmt::format(
          "In this task participants repeatedly choose between two slot machines (actions 0 and 1). Each machine pays "
          "out a reward with a fixed probability that the participant does not know, and they learn from the "
          "outcomes which machine is better.{}",
          kind.feedback == Feedback::Full ? " After each choice they also see what the other machine would have paid." : "");
    case Paradigm::Planning:
      return "In this task participants first choose one of two magic carpets (action_1). Each carpet usually flies "
             "to one mountain and occasionally to the other (state_2). On the mountain they ask one of two genies "
             "for treasure (action_2). The genies' payout probabilities change slowly over time.";
    case Paradigm::WorkingMemory:
      return "In this task participants learn which of three keys (actions 0, 1, 2) is correct for each image. "
             "Blocks differ in how many images must be learned (set_size), and each image is shown several times "
             "within its block. Correct responses are rewarded with 1, errors with 0.";
  }
  return {};
}

std::string default_guardrails(ParadigmKind kind, std::size_t n_candidates) {
  std::string bindings;
  switch (kind.paradigm) {
    case Paradigm::DecisionMaking: bindings = "features_a, features_b, validities; choose(choice, ...)"; break;
    case Paradigm::Learning:
      bindings = kind.feedback == Feedback::Full ? "block, action, reward, forgone_reward; choose(action, ...)"
                                                 : "block, action, reward; choose(action, ...)";
      break;
    case Paradigm::Planning: bindings = "action_1, state_2, action_2, reward; choose(action_1, ...) then choose(action_2, ...)"; break;
    case Paradigm::WorkingMemory: bindings = "block, set_size, stimulus, action, reward; choose(action, ...)"; break;
  }
  return fmt::format(
      "Write each model in MDL. A program has a `params` block with bounds (`name: [low, high]`), an optional "
      "`state` block of variables kept across trials (`state reset_per_block` resets them at each new block), and a "
      "`trial` block run once per trial. Inside `trial` use assignments, `+=`, `-=`, `*=`, `/=`, `if`/`else` and "
      "`choose(<response>, <probabilities>)` at the top level. Outcomes can only be read after the choose that "
      "produces them. Available data: trial_index, n_actions, {}. Functions: exp, log, abs, sqrt, min, max, pow, "
      "sum, mean, argmax, len, softmax(x, beta), sigmoid, clamp, dot, fill(n, v), matrix(r, c, v), onehot(i, n). "
      "Learning rates and weights should lie in [0, 1], inverse temperatures in [0, 20].\n"
      "Return exactly {} models, each in its own fenced block tagged `mdl model1`, `mdl model2`, and so on.",
      bindings, n_candidates);
}

std::string default_template(ParadigmKind kind) {
  switch (kind.paradigm) {
    case Paradigm::DecisionMaking:
      return "params {\n  weight: [0, 1]\n  beta: [0, 20]\n}\ntrial {\n  d = features_a - features_b\n"
             "  p_a = sigmoid(beta * weight * sum(d))\n  choose(choice, [p_a, 1 - p_a])\n}\n";
    case Paradigm::Learning:
      return "params {\n  beta: [0, 20]\n}\nstate {\n  V = fill(2, 0.5)\n}\ntrial {\n"
             "  choose(action, softmax(V, beta))\n  V[action] = reward\n}\n";
    case Paradigm::Planning:
      return "params {\n  beta_1: [0, 20]\n  beta_2: [0, 20]\n}\nstate {\n  Q = matrix(3, 2, 0)\n}\ntrial {\n"
             "  choose(action_1, softmax(Q[0], beta_1))\n  choose(action_2, softmax(Q[1 + state_2], beta_2))\n"
             "  Q[1 + state_2, action_2] = reward\n  Q[0, action_1] = reward\n}\n";
    case Paradigm::WorkingMemory:
      return "params {\n  beta: [0, 20]\n}\nstate reset_per_block {\n  Q = matrix(set_size, 3, 1 / 3)\n}\ntrial {\n"
             "  choose(action, softmax(Q[stimulus], beta))\n  Q[stimulus, action] = reward\n}\n";
  }
  return {};
}

std::string construct_feedback(std::string_view best_source, double best_score, Metric metric,
                               const std::vector<std::string>& used_names) {
  if (used_names.empty()) return {};
  std::string source(best_source);
  if (!source.empty() && source.back() != '\n') source += '\n';
  std::string metric_name(to_string(metric));
  for (char& c : metric_name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return fmt::format(
      "{} ({} = {:.2f}):\n\n```mdl\n{}```\n\nParameter names already used in earlier models: {}.\n"
      "Improve on this model and avoid repeating any earlier parameter set.",
      kFeedbackHeader, metric_name, best_score, source, fmt::join(used_names, ", "));
}

}  // namespace cogmod::pipeline
