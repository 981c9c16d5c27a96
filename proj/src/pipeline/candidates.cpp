#include "cogmod/pipeline/candidates.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

namespace cogmod::pipeline {

namespace {

bool collides(const std::set<std::string>& names, const std::set<std::string>& other, Distinctness rule) {
  if (rule == Distinctness::IdenticalSet) return names == other;
  return std::any_of(names.begin(), names.end(), [&](const std::string& n) { return other.count(n) > 0; });
}

}  // namespace

Distinctness parse_distinctness(std::string_view text) {
  if (text == "identical") return Distinctness::IdenticalSet;
  if (text == "overlap") return Distinctness::AnyOverlap;
  throw Error(ErrorKind::ConfigError, fmt::format("unknown distinctness rule '{}'", text));
}

std::string canonical_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c != '_') out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::set<std::string> canonical_names(const mdl::Program& program) {
  std::set<std::string> out;
  for (const auto& p : program.params) out.insert(canonical_name(p.name));
  return out;
}

std::vector<FencedBlock> fenced_blocks(std::string_view response) {
  std::vector<FencedBlock> out;
  std::size_t pos = 0;
  while (true) {
    const auto open = response.find("```mdl", pos);
    if (open == std::string_view::npos) break;
    const auto line_end = response.find('\n', open);
    if (line_end == std::string_view::npos) break;
    const auto info = response.substr(open + 6, line_end - open - 6);
    auto close = response.find("```", line_end + 1);
    if (close == std::string_view::npos) close = response.size();
    FencedBlock block;
    block.source = std::string(response.substr(line_end + 1, close - line_end - 1));
    if (const auto tag = info.find("model"); tag != std::string_view::npos) {
      int k = 0;
      for (std::size_t i = tag + 5; i < info.size() && std::isdigit(static_cast<unsigned char>(info[i])); ++i) {
        k = k * 10 + (info[i] - '0');
      }
      block.index = k;
    }
    out.push_back(std::move(block));
    pos = std::min(response.size(), close + 3);
  }
  return out;
}

std::vector<Candidate> extract_candidates(std::string_view response, ParadigmKind kind,
                                          const std::vector<std::set<std::string>>& history, Distinctness rule,
                                          std::size_t max_candidates) {
  auto blocks = fenced_blocks(response);
  if (blocks.empty()) throw Error(ErrorKind::NoBlocksFound, "the response contains no ```mdl blocks");
  if (blocks.size() > max_candidates) blocks.resize(max_candidates);
  std::vector<Candidate> out;
  std::vector<std::set<std::string>> seen = history;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Candidate c;
    c.index = blocks[b].index > 0 ? blocks[b].index : static_cast<int>(b) + 1;
    c.source = blocks[b].source;
    try {
      auto program = mdl::parse(c.source);
      mdl::validate(program, kind);
      for (const auto& p : program.params) c.param_names.push_back(p.name);
      const auto names = canonical_names(program);
      const bool duplicate = std::any_of(seen.begin(), seen.end(), [&](const auto& s) { return collides(names, s, rule); });
      if (duplicate) {
        throw Error(ErrorKind::DuplicateParameterSet,
                    fmt::format("parameter set {{{}}} repeats an earlier model", fmt::join(c.param_names, ", ")));
      }
      seen.push_back(names);
      c.program = std::move(program);
    } catch (const Error& e) {
      c.error_kind = e.kind();
      c.error = e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace cogmod::pipeline
