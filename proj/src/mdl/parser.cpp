#include <cmath>
#include <charconv>
#include <set>
#include <unordered_set>

#include <fmt/format.h>

#include "catalogue.hpp"
#include "cogmod/error.hpp"
#include "cogmod/mdl.hpp"

namespace cogmod::mdl {

namespace {

enum class Tok {
  Ident,
  Number,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Colon,
  Semicolon,
  Assign,
  PlusAssign,
  MinusAssign,
  StarAssign,
  SlashAssign,
  Plus,
  Minus,
  Star,
  Slash,
  Less,
  LessEqual,
  Greater,
  GreaterEqual,
  EqualEqual,
  NotEqual,
  Newline,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  SourceSpan span;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Newline: return "end of line";
    case Tok::End: return "end of input";
    case Tok::Ident: return "'" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    int depth = 0;
    while (true) {
      skip_blanks();
      SourceSpan span{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", 0.0, span});
        return out;
      }
      char c = src_[pos_];
      if (c == '\n') {
        advance();
        if (depth == 0) out.push_back({Tok::Newline, "\\n", 0.0, span});
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          advance();
        }
        out.push_back({Tok::Ident, std::string(src_.substr(start, pos_ - start)), 0.0, span});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        out.push_back(number(span));
        continue;
      }
      auto two = src_.substr(pos_, 2);
      auto emit2 = [&](Tok kind) {
        out.push_back({kind, std::string(two), 0.0, span});
        advance();
        advance();
      };
      if (two == "+=") { emit2(Tok::PlusAssign); continue; }
      if (two == "-=") { emit2(Tok::MinusAssign); continue; }
      if (two == "*=") { emit2(Tok::StarAssign); continue; }
      if (two == "/=") { emit2(Tok::SlashAssign); continue; }
      if (two == "<=") { emit2(Tok::LessEqual); continue; }
      if (two == ">=") { emit2(Tok::GreaterEqual); continue; }
      if (two == "==") { emit2(Tok::EqualEqual); continue; }
      if (two == "!=") { emit2(Tok::NotEqual); continue; }
      Tok kind;
      switch (c) {
        case '{': kind = Tok::LBrace; break;
        case '}': kind = Tok::RBrace; break;
        case '(': kind = Tok::LParen; ++depth; break;
        case ')': kind = Tok::RParen; depth = std::max(0, depth - 1); break;
        case '[': kind = Tok::LBracket; ++depth; break;
        case ']': kind = Tok::RBracket; depth = std::max(0, depth - 1); break;
        case ',': kind = Tok::Comma; break;
        case ':': kind = Tok::Colon; break;
        case ';': kind = Tok::Semicolon; break;
        case '=': kind = Tok::Assign; break;
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        case '*': kind = Tok::Star; break;
        case '/': kind = Tok::Slash; break;
        case '<': kind = Tok::Less; break;
        case '>': kind = Tok::Greater; break;
        default:
          throw SyntaxError(span.line, span.column, "a token", fmt::format("'{}'", c));
      }
      out.push_back({kind, std::string(1, c), 0.0, span});
      advance();
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_blanks() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token number(SourceSpan span) {
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save_pos = pos_;
      int save_line = line_, save_col = col_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits();
      } else {
        pos_ = save_pos;
        line_ = save_line;
        col_ = save_col;
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw SyntaxError(span.line, span.column, "a number", "'" + text + "'");
    }
    return {Tok::Number, text, value, span};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Program program() {
    Program prog;
    skip_newlines();
    expect_keyword("params");
    params(prog);
    skip_newlines();
    if (at_keyword("state")) {
      state(prog);
      skip_newlines();
    }
    expect_keyword("trial");
    prog.trial = block();
    skip_newlines();
    if (peek().kind != Tok::End) fail("end of input");
    return prog;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const auto& t = peek();
    throw SyntaxError(t.span.line, t.span.column, expected, describe(t));
  }

  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_keyword(std::string_view word) const { return at(Tok::Ident) && peek().text == word; }

  const Token& expect(Tok kind, const std::string& what) {
    if (!at(kind)) fail(what);
    return next();
  }

  void expect_keyword(std::string_view word) {
    if (!at_keyword(word)) fail(fmt::format("'{}'", word));
    next();
  }

  void skip_newlines() {
    while (at(Tok::Newline) || at(Tok::Semicolon)) next();
  }

  std::string identifier(const std::string& what) {
    if (!at(Tok::Ident) || detail::is_keyword(peek().text)) fail(what);
    return next().text;
  }

  double signed_number() {
    bool negative = false;
    if (at(Tok::Minus)) {
      next();
      negative = true;
    }
    double v = expect(Tok::Number, "a number").number;
    return negative ? -v : v;
  }

  void end_of_item() {
    if (at(Tok::RBrace)) return;
    if (!at(Tok::Newline) && !at(Tok::Semicolon) && !at(Tok::Comma)) fail("end of line");
    while (at(Tok::Newline) || at(Tok::Semicolon) || at(Tok::Comma)) next();
  }

  void params(Program& prog) {
    expect(Tok::LBrace, "'{'");
    skip_newlines();
    if (at(Tok::RBrace)) fail("a parameter declaration");
    while (!at(Tok::RBrace)) {
      ParamDecl p;
      p.span = peek().span;
      p.name = identifier("a parameter name");
      expect(Tok::Colon, "':'");
      expect(Tok::LBracket, "'['");
      p.lower = signed_number();
      expect(Tok::Comma, "','");
      p.upper = signed_number();
      expect(Tok::RBracket, "']'");
      prog.params.push_back(std::move(p));
      end_of_item();
    }
    next();
  }

  void state(Program& prog) {
    expect_keyword("state");
    if (at_keyword("reset_per_block")) {
      next();
      prog.reset_per_block = true;
    }
    expect(Tok::LBrace, "'{'");
    skip_newlines();
    if (at(Tok::RBrace)) fail("a state declaration");
    while (!at(Tok::RBrace)) {
      StateDecl s;
      s.span = peek().span;
      s.name = identifier("a state variable name");
      expect(Tok::Assign, "'='");
      s.init = expression();
      prog.state.push_back(std::move(s));
      if (at(Tok::Comma)) fail("end of line");
      end_of_item();
    }
    next();
  }

  std::vector<Stmt> block() {
    expect(Tok::LBrace, "'{'");
    skip_newlines();
    std::vector<Stmt> body;
    if (at(Tok::RBrace)) fail("a statement");
    while (!at(Tok::RBrace)) {
      body.push_back(statement());
      if (at(Tok::RBrace)) break;
      if (!at(Tok::Newline) && !at(Tok::Semicolon)) fail("end of line");
      skip_newlines();
    }
    next();
    return body;
  }

  Stmt statement() {
    Stmt s;
    s.span = peek().span;
    if (at_keyword("if")) return if_statement();
    if (at_keyword("choose")) {
      next();
      s.kind = StmtKind::Choose;
      expect(Tok::LParen, "'('");
      s.choice = identifier("the response name");
      expect(Tok::Comma, "','");
      s.value = expression();
      expect(Tok::RParen, "')'");
      return s;
    }
    s.target.name = identifier("a statement");
    while (at(Tok::LBracket)) {
      next();
      s.target.indices.push_back(expression());
      if (at(Tok::Comma)) {
        next();
        s.target.indices.push_back(expression());
      }
      expect(Tok::RBracket, "']'");
    }
    if (s.target.indices.size() > 2) {
      throw SyntaxError(s.span.line, s.span.column, "at most two indices", "more");
    }
    switch (peek().kind) {
      case Tok::Assign: s.kind = StmtKind::Assign; break;
      case Tok::PlusAssign: s.kind = StmtKind::AugAssign; s.op = Op::Add; break;
      case Tok::MinusAssign: s.kind = StmtKind::AugAssign; s.op = Op::Sub; break;
      case Tok::StarAssign: s.kind = StmtKind::AugAssign; s.op = Op::Mul; break;
      case Tok::SlashAssign: s.kind = StmtKind::AugAssign; s.op = Op::Div; break;
      default: fail("'=' or an augmented assignment");
    }
    next();
    s.value = expression();
    return s;
  }

  Stmt if_statement() {
    Stmt s;
    s.span = peek().span;
    s.kind = StmtKind::If;
    expect_keyword("if");
    s.value = expression();
    s.then_body = block();
    // `else` may follow on the same line as the closing brace only.
    if (at_keyword("else")) {
      next();
      if (at_keyword("if")) {
        s.else_body.push_back(if_statement());
      } else {
        s.else_body = block();
      }
    }
    return s;
  }

  Expr expression() { return or_expr(); }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (at_keyword("or")) {
      auto span = next().span;
      lhs = Expr::make_binary(Op::Or, std::move(lhs), and_expr(), span);
    }
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = not_expr();
    while (at_keyword("and")) {
      auto span = next().span;
      lhs = Expr::make_binary(Op::And, std::move(lhs), not_expr(), span);
    }
    return lhs;
  }

  Expr not_expr() {
    if (at_keyword("not")) {
      auto span = next().span;
      return Expr::make_unary(Op::Not, not_expr(), span);
    }
    return comparison();
  }

  Expr comparison() {
    Expr lhs = additive();
    while (true) {
      Op op;
      switch (peek().kind) {
        case Tok::Less: op = Op::Less; break;
        case Tok::LessEqual: op = Op::LessEqual; break;
        case Tok::Greater: op = Op::Greater; break;
        case Tok::GreaterEqual: op = Op::GreaterEqual; break;
        case Tok::EqualEqual: op = Op::Equal; break;
        case Tok::NotEqual: op = Op::NotEqual; break;
        default: return lhs;
      }
      auto span = next().span;
      lhs = Expr::make_binary(op, std::move(lhs), additive(), span);
    }
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      Op op = at(Tok::Plus) ? Op::Add : Op::Sub;
      auto span = next().span;
      lhs = Expr::make_binary(op, std::move(lhs), multiplicative(), span);
    }
    return lhs;
  }

  Expr multiplicative() {
    Expr lhs = unary();
    while (at(Tok::Star) || at(Tok::Slash)) {
      Op op = at(Tok::Star) ? Op::Mul : Op::Div;
      auto span = next().span;
      lhs = Expr::make_binary(op, std::move(lhs), unary(), span);
    }
    return lhs;
  }

  Expr unary() {
    if (at(Tok::Minus)) {
      auto span = next().span;
      return Expr::make_unary(Op::Negate, unary(), span);
    }
    return postfix();
  }

  Expr postfix() {
    Expr e = primary();
    while (at(Tok::LBracket)) {
      auto span = next().span;
      std::vector<Expr> indices;
      indices.push_back(expression());
      if (at(Tok::Comma)) {
        next();
        indices.push_back(expression());
      }
      expect(Tok::RBracket, "']'");
      e = Expr::make_index(std::move(e), std::move(indices), span);
    }
    return e;
  }

  std::vector<Expr> list(Tok close, const std::string& close_text) {
    std::vector<Expr> items;
    if (at(close)) {
      next();
      return items;
    }
    while (true) {
      items.push_back(expression());
      if (at(Tok::Comma)) {
        next();
        continue;
      }
      expect(close, close_text);
      return items;
    }
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        next();
        return Expr::make_number(t.number, t.span);
      }
      case Tok::LParen: {
        next();
        Expr e = expression();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::LBracket: {
        auto span = next().span;
        return Expr::make_vector(list(Tok::RBracket, "']'"), span);
      }
      case Tok::Ident: {
        if (detail::is_keyword(t.text)) fail("an expression");
        auto span = t.span;
        std::string name = next().text;
        if (at(Tok::LParen)) {
          next();
          return Expr::make_call(std::move(name), list(Tok::RParen, "')'"), span);
        }
        return Expr::make_name(std::move(name), span);
      }
      default: fail("an expression");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

[[noreturn]] void fail_at(ErrorKind kind, SourceSpan span, const std::string& message) {
  throw Error(kind, fmt::format("line {}, column {}: {}", span.line, span.column, message));
}

/// Paradigm-independent scope analysis.
class Checker {
 public:
  explicit Checker(const Program& prog) : prog_(prog) {}

  void run() {
    std::set<std::string> seen;
    for (const auto& p : prog_.params) {
      if (!seen.insert(p.name).second) fail_at(ErrorKind::DuplicateParameter, p.span, "parameter '" + p.name + "' declared twice");
      if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper)) {
        fail_at(ErrorKind::InvalidProgram, p.span, fmt::format("bounds of '{}' must be finite with lower < upper", p.name));
      }
      reserved_check(p.name, p.span);
      params_.insert(p.name);
    }
    for (const auto& s : prog_.state) {
      reserved_check(s.name, s.span);
      if (params_.count(s.name)) fail_at(ErrorKind::InvalidProgram, s.span, "state '" + s.name + "' shadows a parameter");
      if (state_.count(s.name)) fail_at(ErrorKind::InvalidProgram, s.span, "state '" + s.name + "' declared twice");
      expr(s.init);
      state_.insert(s.name);
    }
    int chooses = 0;
    for (const auto& s : prog_.trial) {
      if (s.kind == StmtKind::Choose) ++chooses;
      stmt(s, true);
    }
    if (chooses == 0) fail_at(ErrorKind::InvalidProgram, {1, 1}, "the trial block never calls choose");
    for (const auto& p : prog_.params) {
      if (!used_.count(p.name)) {
        fail_at(ErrorKind::UnusedParameter, p.span, "parameter '" + p.name + "' is never used");
      }
    }
  }

 private:
  void reserved_check(const std::string& name, SourceSpan span) {
    if (detail::is_binding_name(name) || detail::find_builtin(name)) {
      fail_at(ErrorKind::InvalidProgram, span, "'" + name + "' is a reserved name");
    }
  }

  void expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Number: return;
      case ExprKind::Name:
        if (params_.count(e.name)) {
          used_.insert(e.name);
          return;
        }
        if (state_.count(e.name) || locals_.count(e.name) || detail::is_binding_name(e.name)) return;
        fail_at(ErrorKind::UnknownIdentifier, e.span, "unknown identifier '" + e.name + "'");
      case ExprKind::Call: {
        auto info = detail::find_builtin(e.name);
        if (!info) fail_at(ErrorKind::UnknownIdentifier, e.span, "unknown function '" + e.name + "'");
        const int n = static_cast<int>(e.args.size());
        if (n < info->min_args || n > info->max_args) {
          fail_at(ErrorKind::InvalidProgram, e.span,
                  fmt::format("{} takes {}..{} arguments, got {}", e.name, info->min_args, info->max_args, n));
        }
        break;
      }
      default: break;
    }
    for (const auto& a : e.args) expr(a);
  }

  void stmt(const Stmt& s, bool top_level) {
    switch (s.kind) {
      case StmtKind::Choose:
        if (!top_level) fail_at(ErrorKind::InvalidProgram, s.span, "choose must appear at the top level of the trial block");
        if (!detail::is_choice_name(s.choice)) {
          fail_at(ErrorKind::UnknownIdentifier, s.span, "'" + s.choice + "' is not a response name");
        }
        expr(s.value);
        return;
      case StmtKind::If:
        expr(s.value);
        for (const auto& c : s.then_body) stmt(c, false);
        for (const auto& c : s.else_body) stmt(c, false);
        return;
      case StmtKind::Assign:
      case StmtKind::AugAssign: {
        const auto& name = s.target.name;
        if (params_.count(name) || detail::is_binding_name(name) || detail::find_builtin(name)) {
          fail_at(ErrorKind::InvalidProgram, s.span, "cannot assign to '" + name + "'");
        }
        for (const auto& i : s.target.indices) expr(i);
        expr(s.value);
        const bool known = state_.count(name) || locals_.count(name);
        if (!known && (s.kind == StmtKind::AugAssign || !s.target.indices.empty())) {
          fail_at(ErrorKind::UnknownIdentifier, s.span, "unknown identifier '" + name + "'");
        }
        if (!known) locals_.insert(name);
        return;
      }
    }
  }

  const Program& prog_;
  std::unordered_set<std::string> params_;
  std::unordered_set<std::string> state_;
  std::unordered_set<std::string> locals_;
  std::unordered_set<std::string> used_;
};

}  // namespace

Program parse(std::string_view source) {
  Parser parser(Lexer(source).run());
  Program prog = parser.program();
  prog.source = std::string(source);
  Checker(prog).run();
  return prog;
}

}  // namespace cogmod::mdl
