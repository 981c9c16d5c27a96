#include <fmt/format.h>

#include "catalogue.hpp"
#include "cogmod/error.hpp"
#include "cogmod/mdl.hpp"

namespace cogmod::mdl {

namespace {

[[noreturn]] void fail_at(ErrorKind kind, SourceSpan span, const std::string& message) {
  throw Error(kind, fmt::format("line {}, column {}: {}", span.line, span.column, message));
}

class KindChecker {
 public:
  KindChecker(const Program& prog, ParadigmKind kind) : prog_(prog), kind_(kind) {}

  void run() {
    for (const auto& s : prog_.state) initializer(s.init);
    const int stages = decision_stages(kind_.paradigm);
    for (const auto& s : prog_.trial) {
      if (s.kind == StmtKind::Choose) {
        if (stage_ >= stages) {
          fail_at(ErrorKind::InvalidProgram, s.span,
                  fmt::format("{} has {} choice point(s) per trial", to_string(kind_), stages));
        }
        const auto expected = detail::choice_name(kind_.paradigm, stage_);
        if (s.choice != expected) {
          fail_at(ErrorKind::BindingError, s.span,
                  fmt::format("choice point {} must bind '{}', not '{}'", stage_ + 1, expected, s.choice));
        }
        expr(s.value);
        ++stage_;
        continue;
      }
      stmt(s);
    }
    if (stage_ != stages) {
      fail_at(ErrorKind::InvalidProgram, {1, 1},
              fmt::format("{} needs {} choose statement(s), found {}", to_string(kind_), stages, stage_));
    }
  }

 private:
  void initializer(const Expr& e) {
    if (e.kind == ExprKind::Name && detail::is_binding_name(e.name)) {
      auto info = detail::find_binding(kind_, e.name);
      if (!info) fail_at(ErrorKind::BindingError, e.span, fmt::format("'{}' is not bound for {}", e.name, to_string(kind_)));
      if (!info->block_constant) {
        fail_at(ErrorKind::InvalidProgram, e.span, fmt::format("'{}' changes within a block and cannot initialise state", e.name));
      }
    }
    for (const auto& a : e.args) initializer(a);
  }

  void expr(const Expr& e) {
    if (e.kind == ExprKind::Name && detail::is_binding_name(e.name)) {
      auto info = detail::find_binding(kind_, e.name);
      if (!info) fail_at(ErrorKind::BindingError, e.span, fmt::format("'{}' is not bound for {}", e.name, to_string(kind_)));
      if (info->available_after >= stage_) {
        fail_at(ErrorKind::InvalidProgram, e.span, fmt::format("'{}' is read before the choice that produces it", e.name));
      }
    }
    for (const auto& a : e.args) expr(a);
  }

  void stmt(const Stmt& s) {
    for (const auto& i : s.target.indices) expr(i);
    expr(s.value);
    for (const auto& c : s.then_body) stmt(c);
    for (const auto& c : s.else_body) stmt(c);
  }

  const Program& prog_;
  ParadigmKind kind_;
  int stage_ = 0;
};

}  // namespace

void validate(const Program& program, ParadigmKind kind) { KindChecker(program, kind).run(); }

}  // namespace cogmod::mdl
