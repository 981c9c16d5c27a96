#include "cogmod/mdl/ast.hpp"

namespace cogmod::mdl {

Expr Expr::make_number(double value, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::Number;
  e.number = value;
  e.span = span;
  return e;
}

Expr Expr::make_name(std::string name, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::Name;
  e.name = std::move(name);
  e.span = span;
  return e;
}

Expr Expr::make_unary(Op op, Expr operand, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::Unary;
  e.op = op;
  e.args.push_back(std::move(operand));
  e.span = span;
  return e;
}

Expr Expr::make_binary(Op op, Expr lhs, Expr rhs, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  e.span = span;
  return e;
}

Expr Expr::make_call(std::string name, std::vector<Expr> args, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::Call;
  e.name = std::move(name);
  e.args = std::move(args);
  e.span = span;
  return e;
}

Expr Expr::make_index(Expr target, std::vector<Expr> indices, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::Index;
  e.args.push_back(std::move(target));
  for (auto& i : indices) e.args.push_back(std::move(i));
  e.span = span;
  return e;
}

Expr Expr::make_vector(std::vector<Expr> elements, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::VectorLiteral;
  e.args = std::move(elements);
  e.span = span;
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::Number: return a.number == b.number;
    case ExprKind::Name: return a.name == b.name;
    case ExprKind::Unary:
    case ExprKind::Binary:
      if (a.op != b.op) return false;
      break;
    case ExprKind::Call:
      if (a.name != b.name) return false;
      break;
    case ExprKind::Index:
    case ExprKind::VectorLiteral: break;
  }
  return a.args == b.args;
}

bool operator==(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case StmtKind::Assign: return a.target == b.target && a.value == b.value;
    case StmtKind::AugAssign: return a.target == b.target && a.op == b.op && a.value == b.value;
    case StmtKind::If: return a.value == b.value && a.then_body == b.then_body && a.else_body == b.else_body;
    case StmtKind::Choose: return a.choice == b.choice && a.value == b.value;
  }
  return false;
}

bool operator==(const Program& a, const Program& b) {
  return a.params == b.params && a.reset_per_block == b.reset_per_block && a.state == b.state &&
         a.trial == b.trial;
}

ParameterSpec Program::parameter_spec() const {
  ParameterSpec spec;
  for (const auto& p : params) spec.bounds.push_back({p.name, p.lower, p.upper});
  return spec;
}

std::string_view op_symbol(Op op) noexcept {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Less: return "<";
    case Op::LessEqual: return "<=";
    case Op::Greater: return ">";
    case Op::GreaterEqual: return ">=";
    case Op::Equal: return "==";
    case Op::NotEqual: return "!=";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Negate: return "-";
    case Op::Not: return "not";
  }
  return "?";
}

}  // namespace cogmod::mdl
