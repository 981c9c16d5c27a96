#include "cogmod/library.hpp"

#include <fmt/format.h>

#include "cogmod/error.hpp"

namespace cogmod {

std::optional<std::string_view> transcription(BaselineKind kind) {
  const auto& table = shipped_models();
  const auto it = table.find(baseline_name(kind));
  if (it == table.end()) return std::nullopt;
  return std::string_view(it->second);
}

std::unique_ptr<mdl::ProgramModel> load_shipped(std::string_view name, ParadigmKind kind) {
  const auto& table = shipped_models();
  const auto it = table.find(name);
  if (it == table.end()) throw Error(ErrorKind::DomainError, fmt::format("no shipped model named '{}'", name));
  return std::make_unique<mdl::ProgramModel>(mdl::parse(it->second), kind, std::string(name));
}

}  // namespace cogmod
