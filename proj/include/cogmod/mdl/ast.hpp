#pragma once

#include <string>
#include <vector>

#include "cogmod/model.hpp"

namespace cogmod::mdl {

struct SourceSpan {
  int line = 0;
  int column = 0;
};

enum class ExprKind { Number, Name, Unary, Binary, Call, Index, VectorLiteral };

enum class Op {
  Add,
  Sub,
  Mul,
  Div,
  Less,
  LessEqual,
  Greater,
  GreaterEqual,
  Equal,
  NotEqual,
  And,
  Or,
  Negate,
  Not,
};

/// Expression node. Equality is structural: source spans are ignored.
struct Expr {
  ExprKind kind = ExprKind::Number;
  SourceSpan span;
  double number = 0.0;
  std::string name;         // Name, Call (function name)
  Op op = Op::Add;          // Unary, Binary
  std::vector<Expr> args;   // operands, call arguments, Index: [target, i, (j)], literal elements

  static Expr make_number(double value, SourceSpan span = {});
  static Expr make_name(std::string name, SourceSpan span = {});
  static Expr make_unary(Op op, Expr operand, SourceSpan span = {});
  static Expr make_binary(Op op, Expr lhs, Expr rhs, SourceSpan span = {});
  static Expr make_call(std::string name, std::vector<Expr> args, SourceSpan span = {});
  static Expr make_index(Expr target, std::vector<Expr> indices, SourceSpan span = {});
  static Expr make_vector(std::vector<Expr> elements, SourceSpan span = {});

  friend bool operator==(const Expr& a, const Expr& b);
};

enum class StmtKind { Assign, AugAssign, If, Choose };

struct Target {
  std::string name;
  std::vector<Expr> indices;  // zero, one or two

  friend bool operator==(const Target&, const Target&) = default;
};

struct Stmt {
  StmtKind kind = StmtKind::Assign;
  SourceSpan span;
  Target target;                // Assign / AugAssign
  Op op = Op::Add;              // AugAssign operator
  Expr value;                   // Assign / AugAssign / Choose probabilities / If condition
  std::vector<Stmt> then_body;  // If
  std::vector<Stmt> else_body;  // If
  std::string choice;           // Choose: bound response name

  friend bool operator==(const Stmt& a, const Stmt& b);
};

struct ParamDecl {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  SourceSpan span;

  friend bool operator==(const ParamDecl& a, const ParamDecl& b) {
    return a.name == b.name && a.lower == b.lower && a.upper == b.upper;
  }
};

struct StateDecl {
  std::string name;
  Expr init;
  SourceSpan span;

  friend bool operator==(const StateDecl& a, const StateDecl& b) { return a.name == b.name && a.init == b.init; }
};

/// Parsed model. `source` keeps the original text (comments included).
struct Program {
  std::vector<ParamDecl> params;
  bool reset_per_block = false;
  std::vector<StateDecl> state;
  std::vector<Stmt> trial;
  std::string source;

  ParameterSpec parameter_spec() const;

  /// Structural equality; `source` is not compared.
  friend bool operator==(const Program& a, const Program& b);
};

std::string_view op_symbol(Op op) noexcept;

}  // namespace cogmod::mdl
