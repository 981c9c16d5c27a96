#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "cogmod/baselines.hpp"
#include "cogmod/mdl.hpp"

namespace cogmod {

/// MDL sources bundled with the library, keyed by file stem ("rw", "hybrid", ...).
const std::map<std::string, std::string, std::less<>>& shipped_models();

/// MDL transcription of a native baseline, if one ships. The decision
/// heuristics with a lapse rate have none.
std::optional<std::string_view> transcription(BaselineKind kind);

/// Parses a shipped model and binds it to `kind`. Throws DomainError for an unknown name.
std::unique_ptr<mdl::ProgramModel> load_shipped(std::string_view name, ParadigmKind kind);

}  // namespace cogmod
