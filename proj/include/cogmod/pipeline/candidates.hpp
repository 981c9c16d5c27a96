#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cogmod/error.hpp"
#include "cogmod/mdl.hpp"

namespace cogmod::pipeline {

/// How candidate parameter sets are compared against siblings and history.
enum class Distinctness {
  IdenticalSet,  // reject only an exactly repeated set of names
  AnyOverlap,    // reject when any single name was seen before
};

Distinctness parse_distinctness(std::string_view text);

/// Lowercased with underscores removed.
std::string canonical_name(std::string_view name);
std::set<std::string> canonical_names(const mdl::Program& program);

struct FencedBlock {
  int index = 0;  // from the `modelK` tag; 0 when untagged
  std::string source;
};

/// Every ```mdl ...``` block in the text, in order.
std::vector<FencedBlock> fenced_blocks(std::string_view response);

struct Candidate {
  int index = 0;
  std::string source;
  std::vector<std::string> param_names;
  std::optional<mdl::Program> program;  // set when accepted
  std::optional<ErrorKind> error_kind;  // set when rejected
  std::string error;

  bool accepted() const noexcept { return program.has_value(); }
};

/// Parses and validates up to `max_candidates` blocks. Failures are returned
/// as rejected entries carrying the diagnostic. A block whose canonical name
/// set collides with an accepted sibling or with `history` is rejected with
/// DuplicateParameterSet. Throws NoBlocksFound.
std::vector<Candidate> extract_candidates(std::string_view response, ParadigmKind kind,
                                          const std::vector<std::set<std::string>>& history,
                                          Distinctness rule = Distinctness::IdenticalSet,
                                          std::size_t max_candidates = 3);

}  // namespace cogmod::pipeline
