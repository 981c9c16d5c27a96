#include <fmt/format.h>

#include "cogmod/mdl.hpp"

namespace cogmod::mdl {

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Binary:
      switch (e.op) {
        case Op::Or: return 1;
        case Op::And: return 2;
        case Op::Add:
        case Op::Sub: return 5;
        case Op::Mul:
        case Op::Div: return 6;
        default: return 4;
      }
    case ExprKind::Unary: return e.op == Op::Not ? 3 : 7;
    case ExprKind::Index: return 8;
    default: return 9;
  }
}

void emit(const Expr& e, std::string& out);

void emit_min(const Expr& e, int min_precedence, std::string& out) {
  if (precedence(e) < min_precedence) {
    out += '(';
    emit(e, out);
    out += ')';
  } else {
    emit(e, out);
  }
}

void emit_list(const std::vector<Expr>& items, std::size_t first, std::string& out) {
  for (std::size_t i = first; i < items.size(); ++i) {
    if (i > first) out += ", ";
    emit(items[i], out);
  }
}

void emit(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::Number:
      out += fmt::format("{}", e.number);
      return;
    case ExprKind::Name:
      out += e.name;
      return;
    case ExprKind::Unary:
      if (e.op == Op::Not) {
        out += "not ";
        emit_min(e.args[0], 3, out);
      } else {
        out += '-';
        emit_min(e.args[0], 7, out);
      }
      return;
    case ExprKind::Binary: {
      const int p = precedence(e);
      emit_min(e.args[0], p, out);
      out += fmt::format(" {} ", op_symbol(e.op));
      emit_min(e.args[1], p + 1, out);
      return;
    }
    case ExprKind::Call:
      out += e.name;
      out += '(';
      emit_list(e.args, 0, out);
      out += ')';
      return;
    case ExprKind::Index:
      emit_min(e.args[0], 8, out);
      out += '[';
      emit_list(e.args, 1, out);
      out += ']';
      return;
    case ExprKind::VectorLiteral:
      out += '[';
      emit_list(e.args, 0, out);
      out += ']';
      return;
  }
}

void indent(int depth, std::string& out) { out.append(static_cast<std::size_t>(2 * depth), ' '); }

void emit_body(const std::vector<Stmt>& body, int depth, std::string& out);

void emit_if(const Stmt& s, int depth, std::string& out) {
  out += "if ";
  emit(s.value, out);
  out += " {\n";
  emit_body(s.then_body, depth + 1, out);
  indent(depth, out);
  out += '}';
  if (s.else_body.empty()) return;
  if (s.else_body.size() == 1 && s.else_body.front().kind == StmtKind::If) {
    out += " else ";
    emit_if(s.else_body.front(), depth, out);
    return;
  }
  out += " else {\n";
  emit_body(s.else_body, depth + 1, out);
  indent(depth, out);
  out += '}';
}

void emit_stmt(const Stmt& s, int depth, std::string& out) {
  indent(depth, out);
  switch (s.kind) {
    case StmtKind::Choose:
      out += fmt::format("choose({}, ", s.choice);
      emit(s.value, out);
      out += ')';
      break;
    case StmtKind::If:
      emit_if(s, depth, out);
      break;
    case StmtKind::Assign:
    case StmtKind::AugAssign:
      out += s.target.name;
      if (!s.target.indices.empty()) {
        out += '[';
        emit_list(s.target.indices, 0, out);
        out += ']';
      }
      if (s.kind == StmtKind::Assign) {
        out += " = ";
      } else {
        out += fmt::format(" {}= ", op_symbol(s.op));
      }
      emit(s.value, out);
      break;
  }
  out += '\n';
}

void emit_body(const std::vector<Stmt>& body, int depth, std::string& out) {
  for (const auto& s : body) emit_stmt(s, depth, out);
}

}  // namespace

std::string print(const Expr& expr) {
  std::string out;
  emit(expr, out);
  return out;
}

std::string print(const Program& program) {
  std::string out = "params {\n";
  for (const auto& p : program.params) out += fmt::format("  {}: [{}, {}]\n", p.name, p.lower, p.upper);
  out += "}\n";
  if (!program.state.empty()) {
    out += program.reset_per_block ? "state reset_per_block {\n" : "state {\n";
    for (const auto& s : program.state) {
      out += fmt::format("  {} = ", s.name);
      emit(s.init, out);
      out += '\n';
    }
    out += "}\n";
  }
  out += "trial {\n";
  emit_body(program.trial, 1, out);
  out += "}\n";
  return out;
}

}  // namespace cogmod::mdl
