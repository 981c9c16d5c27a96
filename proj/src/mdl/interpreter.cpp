#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>

#include "catalogue.hpp"
#include "cogmod/error.hpp"
#include "cogmod/mdl.hpp"
#include "value.hpp"

namespace cogmod::mdl {

using detail::Binding;
using detail::Builtin;
using detail::Value;

namespace {

constexpr int kMaxExtent = 4096;

enum class NodeKind { Const, Slot, Unary, Binary, Call, Index, Vector };

struct Node {
  NodeKind kind = NodeKind::Const;
  double constant = 0.0;
  int slot = -1;
  Op op = Op::Add;
  Builtin fn = Builtin::Exp;
  std::vector<Node> args;
  SourceSpan span;
};

struct Instr {
  StmtKind kind = StmtKind::Assign;
  int slot = -1;
  std::string name;
  std::vector<Node> indices;
  Op op = Op::Add;
  Node value;
  std::vector<Instr> then_body;
  std::vector<Instr> else_body;
  int stage = 0;
  SourceSpan span;
};

struct BoundSlot {
  int slot;
  Binding id;
};

[[noreturn]] void runtime_error(ErrorKind kind, SourceSpan span, const std::string& message) {
  throw Error(kind, fmt::format("line {}, column {}: {}", span.line, span.column, message));
}

}  // namespace

struct ProgramModel::Compiled {
  int n_slots = 0;
  std::size_t n_params = 0;
  std::vector<int> state_slots;
  std::vector<Node> state_init;
  std::vector<int> local_slots;
  std::vector<BoundSlot> before_choice;
  std::vector<std::vector<BoundSlot>> after_stage;
  std::vector<Instr> body;
  bool reset_per_block = false;
};

namespace {

class Compiler {
 public:
  Compiler(const Program& prog, ParadigmKind kind) : prog_(prog), kind_(kind) {}

  std::unique_ptr<ProgramModel::Compiled> run() {
    auto c = std::make_unique<ProgramModel::Compiled>();
    c->n_params = prog_.params.size();
    c->reset_per_block = prog_.reset_per_block;
    for (const auto& p : prog_.params) add_slot(p.name);
    for (const auto& s : prog_.state) c->state_slots.push_back(add_slot(s.name));
    collect_locals(prog_.trial, *c);
    c->after_stage.resize(static_cast<std::size_t>(decision_stages(kind_.paradigm)));
    for (const auto& info : detail::bindings_for(kind_)) {
      BoundSlot b{add_slot(std::string(info.name)), info.id};
      if (info.available_after < 0) {
        c->before_choice.push_back(b);
      } else {
        c->after_stage[static_cast<std::size_t>(info.available_after)].push_back(b);
      }
    }
    for (const auto& s : prog_.state) c->state_init.push_back(expr(s.init));
    c->body = body(prog_.trial);
    c->n_slots = static_cast<int>(slots_.size());
    return c;
  }

 private:
  int add_slot(const std::string& name) {
    auto [it, inserted] = slots_.emplace(name, static_cast<int>(slots_.size()));
    return it->second;
  }

  void collect_locals(const std::vector<Stmt>& stmts, ProgramModel::Compiled& c) {
    for (const auto& s : stmts) {
      if (s.kind == StmtKind::Assign && !slots_.count(s.target.name)) {
        c.local_slots.push_back(add_slot(s.target.name));
      }
      collect_locals(s.then_body, c);
      collect_locals(s.else_body, c);
    }
  }

  int resolve(const std::string& name) const { return slots_.at(name); }

  Node expr(const Expr& e) {
    Node n;
    n.span = e.span;
    switch (e.kind) {
      case ExprKind::Number:
        n.kind = NodeKind::Const;
        n.constant = e.number;
        return n;
      case ExprKind::Name:
        n.kind = NodeKind::Slot;
        n.slot = resolve(e.name);
        return n;
      case ExprKind::Unary: n.kind = NodeKind::Unary; break;
      case ExprKind::Binary: n.kind = NodeKind::Binary; break;
      case ExprKind::Call:
        n.kind = NodeKind::Call;
        n.fn = detail::find_builtin(e.name)->id;
        break;
      case ExprKind::Index: n.kind = NodeKind::Index; break;
      case ExprKind::VectorLiteral: n.kind = NodeKind::Vector; break;
    }
    n.op = e.op;
    for (const auto& a : e.args) n.args.push_back(expr(a));
    return n;
  }

  std::vector<Instr> body(const std::vector<Stmt>& stmts) {
    std::vector<Instr> out;
    for (const auto& s : stmts) {
      Instr in;
      in.kind = s.kind;
      in.span = s.span;
      in.op = s.op;
      in.value = expr(s.value);
      switch (s.kind) {
        case StmtKind::Choose:
          in.stage = stage_++;
          break;
        case StmtKind::If:
          in.then_body = body(s.then_body);
          in.else_body = body(s.else_body);
          break;
        case StmtKind::Assign:
        case StmtKind::AugAssign:
          in.name = s.target.name;
          in.slot = resolve(s.target.name);
          for (const auto& i : s.target.indices) in.indices.push_back(expr(i));
          break;
      }
      out.push_back(std::move(in));
    }
    return out;
  }

  const Program& prog_;
  ParadigmKind kind_;
  std::unordered_map<std::string, int> slots_;
  int stage_ = 0;
};

double apply(Op op, double a, double b, SourceSpan span) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (std::abs(b) < kDivisionGuard) runtime_error(ErrorKind::NumericsError, span, "division by (near) zero");
      return a / b;
    case Op::Less: return a < b ? 1.0 : 0.0;
    case Op::LessEqual: return a <= b ? 1.0 : 0.0;
    case Op::Greater: return a > b ? 1.0 : 0.0;
    case Op::GreaterEqual: return a >= b ? 1.0 : 0.0;
    case Op::Equal: return a == b ? 1.0 : 0.0;
    case Op::NotEqual: return a != b ? 1.0 : 0.0;
    default: return 0.0;
  }
}

std::string shape_text(const Value& v) {
  switch (v.rank) {
    case 0: return "scalar";
    case 1: return fmt::format("vector({})", v.cols);
    default: return fmt::format("matrix({}, {})", v.rows, v.cols);
  }
}

Value broadcast(const Value& a, const Value& b, SourceSpan span, auto&& f) {
  if (a.rank == 0 && b.rank == 0) return Value::scalar(f(a.data[0], b.data[0]));
  if (b.rank == 0) {
    Value out = a;
    for (double& x : out.data) x = f(x, b.data[0]);
    return out;
  }
  if (a.rank == 0) {
    Value out = b;
    for (double& x : out.data) x = f(a.data[0], x);
    return out;
  }
  if (!a.same_shape(b)) {
    runtime_error(ErrorKind::IndexError, span, fmt::format("shape mismatch: {} and {}", shape_text(a), shape_text(b)));
  }
  Value out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = f(a.data[i], b.data[i]);
  return out;
}

double require_scalar(const Value& v, SourceSpan span, std::string_view what) {
  if (v.rank != 0) runtime_error(ErrorKind::IndexError, span, fmt::format("{} must be a scalar, got {}", what, shape_text(v)));
  return v.data[0];
}

int to_index(const Value& v, int extent, SourceSpan span) {
  const double x = require_scalar(v, span, "index");
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9) runtime_error(ErrorKind::IndexError, span, fmt::format("index {} is not an integer", x));
  if (r < 0 || r >= extent) runtime_error(ErrorKind::IndexError, span, fmt::format("index {} out of range [0, {})", r, extent));
  return static_cast<int>(r);
}

int to_extent(const Value& v, SourceSpan span) {
  const double x = require_scalar(v, span, "size");
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 || r < 1 || r > kMaxExtent) {
    runtime_error(ErrorKind::IndexError, span, fmt::format("invalid size {}", x));
  }
  return static_cast<int>(r);
}

Value finite_or_throw(Value v, SourceSpan span, std::string_view fn) {
  for (double x : v.data) {
    if (!std::isfinite(x)) runtime_error(ErrorKind::NumericsError, span, fmt::format("{} produced a non-finite value", fn));
  }
  return v;
}

Value map(Value v, auto&& f) {
  for (double& x : v.data) x = f(x);
  return v;
}

Value binding_value(Binding id, const TrialRecord& record, int trial_index) {
  auto ints = [](const std::vector<int>& xs) {
    Value v = Value::vector(static_cast<int>(xs.size()), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) v.data[i] = xs[i];
    return v;
  };
  switch (id) {
    case Binding::Trial: return Value::scalar(trial_index);
    case Binding::NActions: return Value::scalar(option_count(paradigm_of(record)));
    default: break;
  }
  return std::visit(
      [&](const auto& t) -> Value {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DecisionTrial>) {
          if (id == Binding::FeaturesA) return ints(t.features_a);
          if (id == Binding::FeaturesB) return ints(t.features_b);
          if (id == Binding::Validities) {
            Value v = Value::vector(static_cast<int>(t.validities.size()), 0.0);
            std::copy(t.validities.begin(), t.validities.end(), v.data.begin());
            return v;
          }
          if (id == Binding::Choice) return Value::scalar(t.choice);
        } else if constexpr (std::is_same_v<T, LearningTrial>) {
          if (id == Binding::Block) return Value::scalar(t.block);
          if (id == Binding::Action) return Value::scalar(t.action);
          if (id == Binding::Reward) return Value::scalar(t.reward);
          if (id == Binding::ForgoneReward) {
            if (!t.forgone_reward) throw Error(ErrorKind::BindingError, "trial has no forgone reward");
            return Value::scalar(*t.forgone_reward);
          }
        } else if constexpr (std::is_same_v<T, PlanningTrial>) {
          if (id == Binding::Action1) return Value::scalar(t.action_1);
          if (id == Binding::State2) return Value::scalar(t.state_2);
          if (id == Binding::Action2) return Value::scalar(t.action_2);
          if (id == Binding::Reward) return Value::scalar(t.reward);
        } else {
          if (id == Binding::Block) return Value::scalar(t.block);
          if (id == Binding::SetSize) return Value::scalar(t.set_size);
          if (id == Binding::Stimulus) return Value::scalar(t.stimulus);
          if (id == Binding::Action) return Value::scalar(t.action);
          if (id == Binding::Reward) return Value::scalar(t.reward);
        }
        throw Error(ErrorKind::BindingError, "trial record does not provide a bound field");
      },
      record);
}

class ProgramEpisode final : public Episode {
 public:
  ProgramEpisode(const ProgramModel::Compiled& code, std::span<const double> theta)
      : code_(code), slots_(static_cast<std::size_t>(code.n_slots)) {
    for (std::size_t i = 0; i < code.n_params; ++i) slots_[i] = Value::scalar(theta[i]);
  }

  void trial(TrialRecord& record, ChoiceSink& sink) override {
    steps_ = 0;
    record_ = &record;
    sink_ = &sink;
    load(code_.before_choice);
    const int block = block_of(record);
    if (!initialised_ || (code_.reset_per_block && block != block_)) {
      for (std::size_t i = 0; i < code_.state_slots.size(); ++i) {
        slots_[static_cast<std::size_t>(code_.state_slots[i])] =
            checked(eval(code_.state_init[i]), code_.state_init[i].span, "state");
      }
      initialised_ = true;
    }
    block_ = block;
    for (int slot : code_.local_slots) slots_[static_cast<std::size_t>(slot)] = Value::scalar(0.0);
    run(code_.body);
    ++trial_index_;
  }

 private:
  void load(const std::vector<BoundSlot>& bindings) {
    for (const auto& b : bindings) slots_[static_cast<std::size_t>(b.slot)] = binding_value(b.id, *record_, trial_index_);
  }

  void tick(SourceSpan span) {
    if (++steps_ > kStepBudget) {
      runtime_error(ErrorKind::StepBudgetExceeded, span, fmt::format("more than {} operations in one trial", kStepBudget));
    }
  }

  static Value checked(Value v, SourceSpan span, std::string_view name) {
    for (double x : v.data) {
      if (!std::isfinite(x)) runtime_error(ErrorKind::NumericsError, span, fmt::format("non-finite value assigned to {}", name));
    }
    return v;
  }

  bool truth(const Node& n) { return require_scalar(eval(n), n.span, "condition") != 0.0; }

  void run(const std::vector<Instr>& body) {
    for (const auto& in : body) {
      tick(in.span);
      switch (in.kind) {
        case StmtKind::Choose: choose(in); break;
        case StmtKind::If: run(truth(in.value) ? in.then_body : in.else_body); break;
        case StmtKind::Assign:
        case StmtKind::AugAssign: assign(in); break;
      }
    }
  }

  void choose(const Instr& in) {
    Value probs = eval(in.value);
    if (probs.rank != 1) {
      runtime_error(ErrorKind::BindingError, in.span, fmt::format("choose needs a probability vector, got {}", shape_text(probs)));
    }
    sink_->choose(in.stage, std::span<const double>(probs.data.data(), probs.size()));
    load(code_.after_stage[static_cast<std::size_t>(in.stage)]);
  }

  void assign(const Instr& in) {
    Value& target = slots_[static_cast<std::size_t>(in.slot)];
    Value rhs = eval(in.value);
    auto combine = [&](const Value& current) {
      return in.kind == StmtKind::Assign
                 ? rhs
                 : broadcast(current, rhs, in.span, [&](double a, double b) { return apply(in.op, a, b, in.span); });
    };
    if (in.indices.empty()) {
      target = checked(combine(target), in.span, in.name);
      return;
    }
    if (in.indices.size() == 2 || (target.rank == 1 && in.indices.size() == 1)) {
      std::size_t offset;
      if (in.indices.size() == 2) {
        if (target.rank != 2) runtime_error(ErrorKind::IndexError, in.span, in.name + " is not a matrix");
        const int i = to_index(eval(in.indices[0]), target.rows, in.span);
        const int j = to_index(eval(in.indices[1]), target.cols, in.span);
        offset = static_cast<std::size_t>(i * target.cols + j);
      } else {
        offset = static_cast<std::size_t>(to_index(eval(in.indices[0]), target.cols, in.span));
      }
      Value updated = checked(combine(Value::scalar(target.data[offset])), in.span, in.name);
      target.data[offset] = require_scalar(updated, in.span, "element value");
      return;
    }
    if (target.rank != 2) runtime_error(ErrorKind::IndexError, in.span, in.name + " cannot be indexed");
    const int i = to_index(eval(in.indices[0]), target.rows, in.span);
    Value row = Value::vector(target.cols, 0.0);
    auto first = target.data.begin() + static_cast<std::ptrdiff_t>(i * target.cols);
    std::copy(first, first + target.cols, row.data.begin());
    Value updated = checked(combine(row), in.span, in.name);
    if (updated.rank == 0) updated = Value::vector(target.cols, updated.data[0]);
    if (updated.rank != 1 || updated.cols != target.cols) {
      runtime_error(ErrorKind::IndexError, in.span, fmt::format("cannot store {} in a row of {}", shape_text(updated), in.name));
    }
    std::copy(updated.data.begin(), updated.data.end(), first);
  }

  const Value& ref(const Node& n, Value& scratch) {
    if (n.kind == NodeKind::Slot) {
      tick(n.span);
      return slots_[static_cast<std::size_t>(n.slot)];
    }
    scratch = eval(n);
    return scratch;
  }

  Value eval(const Node& n) {
    tick(n.span);
    switch (n.kind) {
      case NodeKind::Const: return Value::scalar(n.constant);
      case NodeKind::Slot: return slots_[static_cast<std::size_t>(n.slot)];
      case NodeKind::Unary: {
        Value v = eval(n.args[0]);
        if (n.op == Op::Not) return Value::scalar(require_scalar(v, n.span, "operand of not") == 0.0 ? 1.0 : 0.0);
        return map(std::move(v), [](double x) { return -x; });
      }
      case NodeKind::Binary: {
        if (n.op == Op::And) return Value::scalar(truth(n.args[0]) && truth(n.args[1]) ? 1.0 : 0.0);
        if (n.op == Op::Or) return Value::scalar(truth(n.args[0]) || truth(n.args[1]) ? 1.0 : 0.0);
        Value lhs = eval(n.args[0]);
        Value rhs = eval(n.args[1]);
        return broadcast(lhs, rhs, n.span, [&](double a, double b) { return apply(n.op, a, b, n.span); });
      }
      case NodeKind::Index: return index(n);
      case NodeKind::Vector: return literal(n);
      case NodeKind::Call: return call(n);
    }
    return Value::scalar(0.0);
  }

  Value index(const Node& n) {
    Value scratch;
    const Value& target = ref(n.args[0], scratch);
    if (target.rank == 0) runtime_error(ErrorKind::IndexError, n.span, "cannot index a scalar");
    if (n.args.size() == 3) {
      if (target.rank != 2) runtime_error(ErrorKind::IndexError, n.span, "two indices need a matrix");
      const int i = to_index(eval(n.args[1]), target.rows, n.span);
      const int j = to_index(eval(n.args[2]), target.cols, n.span);
      return Value::scalar(target.data[static_cast<std::size_t>(i * target.cols + j)]);
    }
    if (target.rank == 1) return Value::scalar(target.data[static_cast<std::size_t>(to_index(eval(n.args[1]), target.cols, n.span))]);
    const int i = to_index(eval(n.args[1]), target.rows, n.span);
    Value row = Value::vector(target.cols, 0.0);
    auto first = target.data.begin() + static_cast<std::ptrdiff_t>(i * target.cols);
    std::copy(first, first + target.cols, row.data.begin());
    return row;
  }

  Value literal(const Node& n) {
    if (n.args.empty()) runtime_error(ErrorKind::IndexError, n.span, "empty vector literal");
    std::vector<Value> items;
    items.reserve(n.args.size());
    for (const auto& a : n.args) items.push_back(eval(a));
    const int count = static_cast<int>(items.size());
    if (items[0].rank == 0) {
      Value out = Value::vector(count, 0.0);
      for (int i = 0; i < count; ++i) out.data[static_cast<std::size_t>(i)] = require_scalar(items[static_cast<std::size_t>(i)], n.span, "vector element");
      return out;
    }
    const int cols = items[0].cols;
    Value out = Value::matrix(count, cols, 0.0);
    for (int i = 0; i < count; ++i) {
      const auto& row = items[static_cast<std::size_t>(i)];
      if (row.rank != 1 || row.cols != cols) runtime_error(ErrorKind::IndexError, n.span, "matrix rows must be vectors of equal length");
      std::copy(row.data.begin(), row.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(i * cols));
    }
    return out;
  }

  Value call(const Node& n) {
    std::vector<Value> a;
    a.reserve(n.args.size());
    for (const auto& arg : n.args) a.push_back(eval(arg));
    const auto span = n.span;
    switch (n.fn) {
      case Builtin::Exp: return finite_or_throw(map(a[0], [](double x) { return std::exp(x); }), span, "exp");
      case Builtin::Log: return finite_or_throw(map(a[0], [](double x) { return std::log(x); }), span, "log");
      case Builtin::Abs: return map(a[0], [](double x) { return std::abs(x); });
      case Builtin::Sqrt: return finite_or_throw(map(a[0], [](double x) { return std::sqrt(x); }), span, "sqrt");
      case Builtin::Sigmoid: return map(a[0], [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
      case Builtin::Min:
      case Builtin::Max: {
        const bool is_min = n.fn == Builtin::Min;
        auto pick = [is_min](double x, double y) { return is_min ? std::min(x, y) : std::max(x, y); };
        if (a.size() == 2) return broadcast(a[0], a[1], span, pick);
        double r = a[0].data[0];
        for (double x : a[0].data) r = pick(r, x);
        return Value::scalar(r);
      }
      case Builtin::Pow:
        return finite_or_throw(broadcast(a[0], a[1], span, [](double x, double y) { return std::pow(x, y); }), span, "pow");
      case Builtin::Sum:
      case Builtin::Mean: {
        double total = 0.0;
        for (double x : a[0].data) total += x;
        return Value::scalar(n.fn == Builtin::Sum ? total : total / static_cast<double>(a[0].size()));
      }
      case Builtin::Argmax: {
        auto it = std::max_element(a[0].data.begin(), a[0].data.end());
        return Value::scalar(static_cast<double>(it - a[0].data.begin()));
      }
      case Builtin::Len: return Value::scalar(a[0].rank == 2 ? a[0].rows : static_cast<double>(a[0].rank == 0 ? 1 : a[0].cols));
      case Builtin::Softmax: {
        if (a[0].rank != 1) runtime_error(ErrorKind::IndexError, span, "softmax needs a vector");
        const double beta = a.size() == 2 ? require_scalar(a[1], span, "softmax temperature") : 1.0;
        Value out = a[0];
        double top = -std::numeric_limits<double>::infinity();
        for (double& x : out.data) {
          x *= beta;
          top = std::max(top, x);
        }
        double total = 0.0;
        for (double& x : out.data) {
          x = std::exp(x - top);
          total += x;
        }
        for (double& x : out.data) x /= total;
        return out;
      }
      case Builtin::Clamp: {
        const double lo = require_scalar(a[1], span, "clamp bound");
        const double hi = require_scalar(a[2], span, "clamp bound");
        if (!(lo <= hi)) runtime_error(ErrorKind::NumericsError, span, "clamp with lower bound above upper bound");
        return map(a[0], [lo, hi](double x) { return std::clamp(x, lo, hi); });
      }
      case Builtin::Dot: {
        if (a[0].rank != 1 || !a[0].same_shape(a[1])) runtime_error(ErrorKind::IndexError, span, "dot needs two vectors of equal length");
        double total = 0.0;
        for (std::size_t i = 0; i < a[0].size(); ++i) total += a[0].data[i] * a[1].data[i];
        return Value::scalar(total);
      }
      case Builtin::Fill: return Value::vector(to_extent(a[0], span), require_scalar(a[1], span, "fill value"));
      case Builtin::Matrix:
        return Value::matrix(to_extent(a[0], span), to_extent(a[1], span), require_scalar(a[2], span, "fill value"));
      case Builtin::Onehot: {
        const int size = to_extent(a[1], span);
        Value out = Value::vector(size, 0.0);
        out.data[static_cast<std::size_t>(to_index(a[0], size, span))] = 1.0;
        return out;
      }
    }
    return Value::scalar(0.0);
  }

  const ProgramModel::Compiled& code_;
  std::vector<Value> slots_;
  TrialRecord* record_ = nullptr;
  ChoiceSink* sink_ = nullptr;
  long steps_ = 0;
  int trial_index_ = 0;
  int block_ = 0;
  bool initialised_ = false;
};

}  // namespace

ProgramModel::ProgramModel(Program program, ParadigmKind kind, std::string id)
    : program_(std::move(program)), kind_(kind), id_(std::move(id)) {
  validate(program_, kind_);
  spec_ = program_.parameter_spec();
  compiled_ = Compiler(program_, kind_).run();
}

ProgramModel::~ProgramModel() = default;

std::unique_ptr<Episode> ProgramModel::start(std::span<const double> theta) const {
  return std::make_unique<ProgramEpisode>(*compiled_, theta);
}

double evaluate_nll(const Program& program, const ParticipantData& participant, std::span<const double> theta) {
  const auto kind = infer_kind(participant);
  ProgramModel model(program, kind, "mdl");
  return negative_log_likelihood(model, kind, participant, theta);
}

ParticipantData simulate(const Program& program, const TaskEnvironment& env, std::span<const double> theta,
                         int n_trials, std::uint64_t seed) {
  ProgramModel model(program, paradigm_kind(env), "mdl");
  return cogmod::simulate(model, env, theta, n_trials, seed);
}

}  // namespace cogmod::mdl
