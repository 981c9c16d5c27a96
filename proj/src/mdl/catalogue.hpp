#pragma once

// Names the MDL runtime binds per paradigm, and the built-in functions.

#include <optional>
#include <string_view>
#include <vector>

#include "cogmod/dataset.hpp"

namespace cogmod::mdl::detail {

enum class Binding {
  Trial,
  NActions,
  FeaturesA,
  FeaturesB,
  Validities,
  Choice,
  Block,
  Action,
  Reward,
  ForgoneReward,
  Action1,
  State2,
  Action2,
  SetSize,
  Stimulus,
};

struct BindingInfo {
  Binding id;
  std::string_view name;
  int available_after;  // -1: before any choice; s: once the stage-s choice is made
  bool block_constant;  // usable in state initialisers
};

/// Every binding name any paradigm defines.
const std::vector<BindingInfo>& all_bindings();

/// Bindings for one paradigm kind.
std::vector<BindingInfo> bindings_for(ParadigmKind kind);

std::optional<BindingInfo> find_binding(ParadigmKind kind, std::string_view name);
bool is_binding_name(std::string_view name);

/// Name of the response bound by the stage-th `choose`.
std::string_view choice_name(Paradigm paradigm, int stage);
bool is_choice_name(std::string_view name);

enum class Builtin {
  Exp,
  Log,
  Abs,
  Sqrt,
  Min,
  Max,
  Pow,
  Sum,
  Mean,
  Argmax,
  Len,
  Softmax,
  Sigmoid,
  Clamp,
  Dot,
  Fill,
  Matrix,
  Onehot,
};

struct BuiltinInfo {
  Builtin id;
  std::string_view name;
  int min_args;
  int max_args;
};

std::optional<BuiltinInfo> find_builtin(std::string_view name);

bool is_keyword(std::string_view word);

}  // namespace cogmod::mdl::detail
