#include "catalogue.hpp"

#include <array>

namespace cogmod::mdl::detail {

const std::vector<BindingInfo>& all_bindings() {
  static const std::vector<BindingInfo> table{
      {Binding::Trial, "trial_index", -1, false},
      {Binding::NActions, "n_actions", -1, true},
      {Binding::FeaturesA, "features_a", -1, false},
      {Binding::FeaturesB, "features_b", -1, false},
      {Binding::Validities, "validities", -1, false},
      {Binding::Choice, "choice", 0, false},
      {Binding::Block, "block", -1, true},
      {Binding::Action, "action", 0, false},
      {Binding::Reward, "reward", 0, false},
      {Binding::ForgoneReward, "forgone_reward", 0, false},
      {Binding::Action1, "action_1", 0, false},
      {Binding::State2, "state_2", 0, false},
      {Binding::Action2, "action_2", 1, false},
      {Binding::SetSize, "set_size", -1, true},
      {Binding::Stimulus, "stimulus", -1, false},
  };
  return table;
}

std::vector<BindingInfo> bindings_for(ParadigmKind kind) {
  std::vector<Binding> ids{Binding::Trial, Binding::NActions};
  switch (kind.paradigm) {
    case Paradigm::DecisionMaking:
      ids.insert(ids.end(), {Binding::FeaturesA, Binding::FeaturesB, Binding::Validities, Binding::Choice});
      break;
    case Paradigm::Learning:
      ids.insert(ids.end(), {Binding::Block, Binding::Action, Binding::Reward});
      if (kind.feedback == Feedback::Full) ids.push_back(Binding::ForgoneReward);
      break;
    case Paradigm::Planning:
      ids.insert(ids.end(), {Binding::Action1, Binding::State2, Binding::Action2, Binding::Reward});
      break;
    case Paradigm::WorkingMemory:
      ids.insert(ids.end(), {Binding::Block, Binding::SetSize, Binding::Stimulus, Binding::Action, Binding::Reward});
      break;
  }
  std::vector<BindingInfo> out;
  for (Binding id : ids) {
    for (const auto& info : all_bindings()) {
      if (info.id != id) continue;
      BindingInfo copy = info;
      // In the two-stage task the reward arrives after the second choice.
      if (kind.paradigm == Paradigm::Planning && id == Binding::Reward) copy.available_after = 1;
      out.push_back(copy);
    }
  }
  return out;
}

std::optional<BindingInfo> find_binding(ParadigmKind kind, std::string_view name) {
  for (const auto& info : bindings_for(kind)) {
    if (info.name == name) return info;
  }
  return std::nullopt;
}

bool is_binding_name(std::string_view name) {
  for (const auto& info : all_bindings()) {
    if (info.name == name) return true;
  }
  return false;
}

std::string_view choice_name(Paradigm paradigm, int stage) {
  switch (paradigm) {
    case Paradigm::DecisionMaking: return "choice";
    case Paradigm::Planning: return stage == 0 ? "action_1" : "action_2";
    default: return "action";
  }
}

bool is_choice_name(std::string_view name) {
  return name == "choice" || name == "action" || name == "action_1" || name == "action_2";
}

std::optional<BuiltinInfo> find_builtin(std::string_view name) {
  static constexpr std::array<BuiltinInfo, 18> table{{
      {Builtin::Exp, "exp", 1, 1},
      {Builtin::Log, "log", 1, 1},
      {Builtin::Abs, "abs", 1, 1},
      {Builtin::Sqrt, "sqrt", 1, 1},
      {Builtin::Min, "min", 1, 2},
      {Builtin::Max, "max", 1, 2},
      {Builtin::Pow, "pow", 2, 2},
      {Builtin::Sum, "sum", 1, 1},
      {Builtin::Mean, "mean", 1, 1},
      {Builtin::Argmax, "argmax", 1, 1},
      {Builtin::Len, "len", 1, 1},
      {Builtin::Softmax, "softmax", 1, 2},
      {Builtin::Sigmoid, "sigmoid", 1, 1},
      {Builtin::Clamp, "clamp", 3, 3},
      {Builtin::Dot, "dot", 2, 2},
      {Builtin::Fill, "fill", 2, 2},
      {Builtin::Matrix, "matrix", 3, 3},
      {Builtin::Onehot, "onehot", 2, 2},
  }};
  for (const auto& info : table) {
    if (info.name == name) return info;
  }
  return std::nullopt;
}

bool is_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 10> keywords{
      "params", "state", "reset_per_block", "trial", "if", "else", "choose", "and", "or", "not"};
  for (auto k : keywords) {
    if (k == word) return true;
  }
  return false;
}

}  // namespace cogmod::mdl::detail
