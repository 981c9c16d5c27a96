#include "cogmod/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "cogmod/error.hpp"

namespace cogmod {

namespace {

template <std::size_t N>
std::array<double, N> softmax(const std::array<double, N>& logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::array<double, N> out{};
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

ParameterSpec make_spec(std::initializer_list<ParameterBound> bounds) { return ParameterSpec{bounds}; }

constexpr double kBetaMax = 20.0;

const std::vector<std::pair<BaselineKind, std::string_view>>& registry() {
  static const std::vector<std::pair<BaselineKind, std::string_view>> table{
      {BaselineKind::TTB, "ttb"},         {BaselineKind::EQW, "eqw"},     {BaselineKind::WADD, "wadd"},
      {BaselineKind::PWADD, "pwadd"},     {BaselineKind::RW, "rw"},       {BaselineKind::RWPlusMinus, "rwpm"},
      {BaselineKind::RWKappa, "rwk"},     {BaselineKind::RW4Alpha, "rw4a"}, {BaselineKind::Hybrid, "hybrid"},
      {BaselineKind::RLWM, "rlwm"},
  };
  return table;
}

// Decision heuristics with a lapse: the predicted option gets 1 - epsilon/2.
class LapseHeuristicEpisode final : public Episode {
 public:
  LapseHeuristicEpisode(Heuristic heuristic, double epsilon) : heuristic_(heuristic), epsilon_(epsilon) {}

  void trial(TrialRecord& record, ChoiceSink& sink) override {
    const auto& t = std::get<DecisionTrial>(record);
    const auto pick = heuristic_choice(heuristic_, t.features_a, t.features_b, t.validities);
    std::array<double, 2> p{0.5, 0.5};
    if (pick != HeuristicChoice::Tie) {
      const std::size_t predicted = pick == HeuristicChoice::A ? 0 : 1;
      p[predicted] = 1.0 - epsilon_ / 2.0;
      p[1 - predicted] = epsilon_ / 2.0;
    }
    sink.choose(0, p);
  }

 private:
  Heuristic heuristic_;
  double epsilon_;
};

class PwaddEpisode final : public Episode {
 public:
  explicit PwaddEpisode(std::span<const double> theta) : beta_(theta[4]) {
    std::copy(theta.begin(), theta.begin() + 4, weights_.begin());
  }

  void trial(TrialRecord& record, ChoiceSink& sink) override {
    const auto& t = std::get<DecisionTrial>(record);
    if (t.features_a.size() != weights_.size() || t.features_b.size() != weights_.size()) {
      throw Error(ErrorKind::LengthMismatch, fmt::format("pwadd expects {} features per option", weights_.size()));
    }
    double drive = 0.0;
    for (std::size_t j = 0; j < weights_.size(); ++j) drive += weights_[j] * (t.features_a[j] - t.features_b[j]);
    const double p_a = 1.0 / (1.0 + std::exp(-beta_ * drive));
    sink.choose(0, std::array<double, 2>{p_a, 1.0 - p_a});
  }

 private:
  std::array<double, 4> weights_{};
  double beta_;
};

struct RwParams {
  double alpha_pos = 0.0;
  double alpha_neg = 0.0;
  double alpha_u_pos = 0.0;
  double alpha_u_neg = 0.0;
  double beta = 0.0;
  double kappa = 0.0;
  bool counterfactual = false;
};

// RW, RW+-, RW+kappa and RW4alpha share one update loop.
class RwEpisode final : public Episode {
 public:
  explicit RwEpisode(const RwParams& p) : p_(p) {}

  void trial(TrialRecord& record, ChoiceSink& sink) override {
    std::array<double, 2> logits{p_.beta * v_[0], p_.beta * v_[1]};
    if (previous_ >= 0) logits[static_cast<std::size_t>(previous_)] += p_.kappa;
    const int a = sink.choose(0, softmax(logits));
    const auto& t = std::get<LearningTrial>(record);
    const auto chosen = static_cast<std::size_t>(a);
    const double delta = t.reward - v_[chosen];
    v_[chosen] += (delta >= 0.0 ? p_.alpha_pos : p_.alpha_neg) * delta;
    if (p_.counterfactual) {
      if (!t.forgone_reward) throw Error(ErrorKind::ParadigmMismatch, "rw4a needs forgone rewards");
      const std::size_t other = 1 - chosen;
      const double delta_u = *t.forgone_reward - v_[other];
      v_[other] += (delta_u >= 0.0 ? p_.alpha_u_pos : p_.alpha_u_neg) * delta_u;
    }
    previous_ = a;
  }

 private:
  RwParams p_;
  std::array<double, 2> v_{0.5, 0.5};
  int previous_ = -1;
};

class HybridEpisode final : public Episode {
 public:
  explicit HybridEpisode(std::span<const double> theta)
      : alpha_1_(theta[0]),
        alpha_2_(theta[1]),
        lambda_(theta[2]),
        w_(theta[3]),
        beta_1_(theta[4]),
        beta_2_(theta[5]),
        p_(theta[6]) {}

  void trial(TrialRecord& record, ChoiceSink& sink) override {
    const double best_0 = std::max(q_[1][0], q_[1][1]);
    const double best_1 = std::max(q_[2][0], q_[2][1]);
    std::array<double, 2> logits{};
    for (std::size_t a = 0; a < 2; ++a) {
      const double mb = a == 0 ? kCommonTransition * best_0 + kRareTransition * best_1
                               : kRareTransition * best_0 + kCommonTransition * best_1;
      const double rep = previous_ == static_cast<int>(a) ? 1.0 : 0.0;
      logits[a] = beta_1_ * (w_ * mb + (1 - w_) * q_[0][a] + p_ * rep);
    }
    const auto a1 = static_cast<std::size_t>(sink.choose(0, softmax(logits)));
    const auto s2 = static_cast<std::size_t>(std::get<PlanningTrial>(record).state_2);
    auto& second = q_[1 + s2];
    const auto a2 = static_cast<std::size_t>(sink.choose(1, softmax(std::array<double, 2>{beta_2_ * second[0], beta_2_ * second[1]})));
    const double r = std::get<PlanningTrial>(record).reward;
    const double q1 = q_[0][a1];
    const double q2 = second[a2];
    q_[0][a1] = q1 + alpha_1_ * (q2 - q1) + alpha_1_ * lambda_ * (r - q2);
    second[a2] = q2 + alpha_2_ * (r - q2);
    previous_ = static_cast<int>(a1);
  }

 private:
  double alpha_1_, alpha_2_, lambda_, w_, beta_1_, beta_2_, p_;
  std::array<std::array<double, 2>, 3> q_{};
  int previous_ = -1;
};

class RlwmEpisode final : public Episode {
 public:
  explicit RlwmEpisode(std::span<const double> theta)
      : alpha_pos_(theta[0]),
        alpha_neg_(theta[1]),
        phi_(theta[2]),
        omega_(theta[3]),
        epsilon_(theta[4]),
        beta_rl_(theta[5]) {
    if (alpha_pos_ >= 1e-12) {
      v_ = std::min(1.0, alpha_neg_ / alpha_pos_);
    } else {
      v_ = alpha_neg_ > 0.0 ? 1.0 : 0.0;
    }
  }

  void trial(TrialRecord& record, ChoiceSink& sink) override {
    const auto& t = std::get<MemoryTrial>(record);
    if (!started_ || t.block != block_) {
      q_.assign(static_cast<std::size_t>(t.set_size), {kInit, kInit, kInit});
      w_.assign(static_cast<std::size_t>(t.set_size), {kInit, kInit, kInit});
      block_ = t.block;
      started_ = true;
    }
    const auto s = static_cast<std::size_t>(t.stimulus);
    if (s >= q_.size()) throw Error(ErrorKind::IndexError, "stimulus outside the block's set size");
    auto& q = q_[s];
    auto& w = w_[s];
    const auto p_rl = softmax(std::array<double, 3>{beta_rl_ * q[0], beta_rl_ * q[1], beta_rl_ * q[2]});
    const auto p_wm = softmax(std::array<double, 3>{kWorkingMemoryBeta * w[0], kWorkingMemoryBeta * w[1],
                                                    kWorkingMemoryBeta * w[2]});
    const double weight = std::pow(omega_, t.set_size);
    std::array<double, 3> p{};
    for (std::size_t a = 0; a < 3; ++a) {
      p[a] = (1 - epsilon_) * (weight * p_wm[a] + (1 - weight) * p_rl[a]) + epsilon_ / 3.0;
    }
    const auto a = static_cast<std::size_t>(sink.choose(0, p));
    const double r = std::get<MemoryTrial>(record).reward;
    const double delta = r - q[a];
    q[a] += (delta > 0.0 ? alpha_pos_ : alpha_neg_) * delta;
    const double delta_wm = r - w[a];
    if (delta_wm > 0.0) {
      w[a] = r;
    } else {
      w[a] += v_ * delta_wm;
    }
    for (std::size_t i = 0; i < w_.size(); ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (i == s && j == a) continue;
        w_[i][j] += phi_ * (kInit - w_[i][j]);
      }
    }
  }

 private:
  static constexpr double kInit = 1.0 / 3.0;
  double alpha_pos_, alpha_neg_, phi_, omega_, epsilon_, beta_rl_;
  double v_ = 0.0;
  std::vector<std::array<double, 3>> q_;
  std::vector<std::array<double, 3>> w_;
  int block_ = 0;
  bool started_ = false;
};

class BaselineModel final : public Model {
 public:
  explicit BaselineModel(BaselineKind kind) : kind_(kind), id_(baseline_name(kind)) {}

  const std::string& id() const override { return id_; }
  const ParameterSpec& parameters() const override { return baseline_parameters(kind_); }
  bool supports(ParadigmKind kind) const override { return baseline_supports(kind_, kind); }

  std::unique_ptr<Episode> start(std::span<const double> theta) const override {
    switch (kind_) {
      case BaselineKind::TTB: return std::make_unique<LapseHeuristicEpisode>(Heuristic::TTB, theta[0]);
      case BaselineKind::EQW: return std::make_unique<LapseHeuristicEpisode>(Heuristic::EQW, theta[0]);
      case BaselineKind::WADD: return std::make_unique<LapseHeuristicEpisode>(Heuristic::WADD, theta[0]);
      case BaselineKind::PWADD: return std::make_unique<PwaddEpisode>(theta);
      case BaselineKind::RW: return std::make_unique<RwEpisode>(RwParams{theta[0], theta[0], 0, 0, theta[1], 0, false});
      case BaselineKind::RWPlusMinus:
        return std::make_unique<RwEpisode>(RwParams{theta[0], theta[1], 0, 0, theta[2], 0, false});
      case BaselineKind::RWKappa:
        return std::make_unique<RwEpisode>(RwParams{theta[0], theta[0], 0, 0, theta[1], theta[2], false});
      case BaselineKind::RW4Alpha:
        return std::make_unique<RwEpisode>(RwParams{theta[0], theta[1], theta[2], theta[3], theta[4], theta[5], true});
      case BaselineKind::Hybrid: return std::make_unique<HybridEpisode>(theta);
      case BaselineKind::RLWM: return std::make_unique<RlwmEpisode>(theta);
    }
    throw Error(ErrorKind::DomainError, "unknown baseline");
  }

 private:
  BaselineKind kind_;
  std::string id_;
};

}  // namespace

std::string_view baseline_name(BaselineKind kind) noexcept {
  for (const auto& [k, name] : registry()) {
    if (k == kind) return name;
  }
  return "?";
}

BaselineKind parse_baseline(std::string_view name) {
  for (const auto& [k, n] : registry()) {
    if (n == name) return k;
  }
  throw Error(ErrorKind::DomainError, fmt::format("unknown baseline model '{}'", name));
}

std::vector<BaselineKind> all_baselines() {
  std::vector<BaselineKind> out;
  for (const auto& entry : registry()) out.push_back(entry.first);
  return out;
}

const ParameterSpec& baseline_parameters(BaselineKind kind) {
  static const ParameterSpec lapse = make_spec({{"epsilon", 0, 1}});
  static const ParameterSpec pwadd =
      make_spec({{"w1", 0, 1}, {"w2", 0, 1}, {"w3", 0, 1}, {"w4", 0, 1}, {"beta", 0, kBetaMax}});
  static const ParameterSpec rw = make_spec({{"alpha", 0, 1}, {"beta", 0, kBetaMax}});
  static const ParameterSpec rwpm = make_spec({{"alpha_pos", 0, 1}, {"alpha_neg", 0, 1}, {"beta", 0, kBetaMax}});
  static const ParameterSpec rwk = make_spec({{"alpha", 0, 1}, {"beta", 0, kBetaMax}, {"kappa", -2, 2}});
  static const ParameterSpec rw4a = make_spec({{"alpha_c_pos", 0, 1},
                                               {"alpha_c_neg", 0, 1},
                                               {"alpha_u_pos", 0, 1},
                                               {"alpha_u_neg", 0, 1},
                                               {"beta", 0, kBetaMax},
                                               {"kappa", -2, 2}});
  static const ParameterSpec hybrid = make_spec({{"alpha_1", 0, 1},
                                                 {"alpha_2", 0, 1},
                                                 {"lambda", 0, 1},
                                                 {"w", 0, 1},
                                                 {"beta_1", 0, kBetaMax},
                                                 {"beta_2", 0, kBetaMax},
                                                 {"p", -2, 2}});
  static const ParameterSpec rlwm = make_spec({{"alpha_pos", 0, 1},
                                               {"alpha_neg", 0, 1},
                                               {"phi", 0, 1},
                                               {"omega", 0, 1},
                                               {"epsilon", 0, 1},
                                               {"beta_rl", 0, kBetaMax}});
  switch (kind) {
    case BaselineKind::TTB:
    case BaselineKind::EQW:
    case BaselineKind::WADD: return lapse;
    case BaselineKind::PWADD: return pwadd;
    case BaselineKind::RW: return rw;
    case BaselineKind::RWPlusMinus: return rwpm;
    case BaselineKind::RWKappa: return rwk;
    case BaselineKind::RW4Alpha: return rw4a;
    case BaselineKind::Hybrid: return hybrid;
    case BaselineKind::RLWM: return rlwm;
  }
  return lapse;
}

bool baseline_supports(BaselineKind kind, ParadigmKind paradigm) noexcept {
  switch (kind) {
    case BaselineKind::TTB:
    case BaselineKind::EQW:
    case BaselineKind::WADD:
    case BaselineKind::PWADD: return paradigm.paradigm == Paradigm::DecisionMaking;
    case BaselineKind::RW:
    case BaselineKind::RWPlusMinus:
    case BaselineKind::RWKappa: return paradigm.paradigm == Paradigm::Learning;
    case BaselineKind::RW4Alpha: return paradigm == ParadigmKind::learning(Feedback::Full);
    case BaselineKind::Hybrid: return paradigm.paradigm == Paradigm::Planning;
    case BaselineKind::RLWM: return paradigm.paradigm == Paradigm::WorkingMemory;
  }
  return false;
}

std::unique_ptr<Model> make_baseline(BaselineKind kind) { return std::make_unique<BaselineModel>(kind); }

double baseline_nll(BaselineKind kind, const ParticipantData& participant, std::span<const double> theta) {
  BaselineModel model(kind);
  return negative_log_likelihood(model, infer_kind(participant), participant, theta);
}

ParticipantData baseline_simulate(BaselineKind kind, const TaskEnvironment& env, std::span<const double> theta,
                                  int n_trials, std::uint64_t seed) {
  BaselineModel model(kind);
  return simulate(model, env, theta, n_trials, seed, std::string(baseline_name(kind)));
}

std::vector<int> validity_order(std::span<const double> validities) {
  std::vector<int> order(validities.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return validities[static_cast<std::size_t>(a)] > validities[static_cast<std::size_t>(b)];
  });
  return order;
}

HeuristicChoice heuristic_choice(Heuristic heuristic, std::span<const int> features_a, std::span<const int> features_b,
                                 std::span<const double> validities, std::span<const int> priority) {
  const std::size_t n = features_a.size();
  if (features_b.size() != n) {
    throw Error(ErrorKind::LengthMismatch, fmt::format("option A has {} features, option B has {}", n, features_b.size()));
  }
  const bool needs_validities = heuristic == Heuristic::WADD || (heuristic == Heuristic::TTB && priority.empty());
  if (needs_validities && validities.size() != n) {
    throw Error(ErrorKind::LengthMismatch, fmt::format("{} features but {} validities", n, validities.size()));
  }
  auto sign = [](double x) {
    if (x > 0) return HeuristicChoice::A;
    if (x < 0) return HeuristicChoice::B;
    return HeuristicChoice::Tie;
  };
  switch (heuristic) {
    case Heuristic::TTB: {
      std::vector<int> order = priority.empty() ? validity_order(validities) : std::vector<int>(priority.begin(), priority.end());
      for (int j : order) {
        if (j < 0 || static_cast<std::size_t>(j) >= n) throw Error(ErrorKind::LengthMismatch, "priority index out of range");
        const auto idx = static_cast<std::size_t>(j);
        if (features_a[idx] != features_b[idx]) return features_a[idx] > features_b[idx] ? HeuristicChoice::A : HeuristicChoice::B;
      }
      return HeuristicChoice::Tie;
    }
    case Heuristic::EQW: {
      long diff = 0;
      for (std::size_t j = 0; j < n; ++j) diff += features_a[j] - features_b[j];
      return sign(static_cast<double>(diff));
    }
    case Heuristic::WADD: {
      double diff = 0.0;
      double scale = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        diff += validities[j] * (features_a[j] - features_b[j]);
        scale += std::abs(validities[j] * (features_a[j] - features_b[j]));
      }
      // Weighted sums that agree up to rounding are a tie.
      return std::abs(diff) <= 1e-12 * scale ? HeuristicChoice::Tie : sign(diff);
    }
    case Heuristic::Tallying: {
      int votes = 0;
      for (std::size_t j = 0; j < n; ++j) votes += (features_a[j] > features_b[j]) - (features_a[j] < features_b[j]);
      return sign(votes);
    }
  }
  return HeuristicChoice::Tie;
}

}  // namespace cogmod
