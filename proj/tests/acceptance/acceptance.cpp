// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any of them fails. Everything runs from seed 0.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cogmod/baselines.hpp"
#include "cogmod/comparison.hpp"
#include "cogmod/library.hpp"
#include "cogmod/pipeline.hpp"
#include "cogmod/ppc.hpp"
#include "cogmod/synthgen.hpp"

using namespace cogmod;
namespace pl = cogmod::pipeline;

namespace {

constexpr std::uint64_t kSeed = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Criteria 1 and 2 share one recovery study.
const RecoveryReport& recovery(double* elapsed = nullptr) {
  static double seconds = 0.0;
  static const RecoveryReport report = [] {
    const auto start = Clock::now();
    RecoveryConfig config;
    config.seed = kSeed;
    auto r = recovery_study(config);
    seconds = seconds_since(start);
    return r;
  }();
  if (elapsed) *elapsed = seconds;
  return report;
}

Outcome criterion1() {
  double elapsed = 0.0;
  const auto& report = recovery(&elapsed);
  const double mean = report.mean_bic_true.at("rwpm");
  const double sem = report.sem_bic_true.at("rwpm");
  const bool in_band = mean >= 67.0 && mean <= 91.0;
  const bool fast = elapsed < 300.0;
  return {in_band && fast, fmt::format("RW+- ground-truth mean BIC {:.2f} (SEM {:.2f}), band [67, 91]; "
                                       "recovery study took {:.1f} s (limit 300 s)",
                                       mean, sem, elapsed)};
}

Outcome criterion2() {
  const auto& report = recovery();
  const double rwpm = report.accuracy.at("rwpm").value_or(0.0);
  const double rwk = report.accuracy.at("rwk").value_or(0.0);
  return {rwpm >= 0.90 && rwk >= 0.75,
          fmt::format("identification accuracy RW+- {:.2f} (need >= 0.90), RW+kappa {:.2f} (need >= 0.75)", rwpm, rwk)};
}

Outcome criterion3() {
  HeuristicStudyConfig config;
  config.seed = kSeed;
  const auto report = heuristic_study(config);
  bool ok = true;
  std::string detail;
  for (const char* h : {"ttb", "tallying"}) {
    std::vector<double> acc;
    std::size_t n_at_half = 0;
    for (double noise : config.noise_levels) {
      for (const auto& s : report.summary) {
        if (s.heuristic == h && s.noise == noise) {
          acc.push_back(s.mean_accuracy);
          if (noise == 0.5) n_at_half = s.n_decisions;
        }
      }
    }
    if (acc.size() != 3) return {false, fmt::format("missing summary rows for {}", h)};
    const double half_width = 1.96 * std::sqrt(0.25 / static_cast<double>(n_at_half));
    const bool exact = acc[0] == 1.0;
    const bool chance = std::abs(acc[2] - 0.5) <= half_width;
    const bool between = acc[1] < acc[0] && acc[1] > acc[2];
    const bool monotone = acc[0] >= acc[1] && acc[1] >= acc[2];
    ok = ok && exact && chance && between && monotone;
    detail += fmt::format("{}: {:.3f} / {:.3f} / {:.3f} (chance CI +-{:.3f}); ", h, acc[0], acc[1], acc[2], half_width);
  }
  return {ok, detail + "noise 0 / 0.25 / 0.5"};
}

Outcome criterion4() {
  double worst = 0.0;
  std::string detail;
  auto check = [&](BaselineKind kind, const Dataset& data, const std::vector<std::vector<double>>& thetas) {
    const auto native = make_baseline(kind);
    const auto program = load_shipped(baseline_name(kind), data.kind);
    double model_worst = 0.0;
    for (std::size_t i = 0; i < data.participants.size(); ++i) {
      const double a = negative_log_likelihood(*native, data.kind, data.participants[i], thetas[i]);
      const double b = negative_log_likelihood(*program, data.kind, data.participants[i], thetas[i]);
      model_worst = std::max(model_worst, std::abs(a - b));
    }
    worst = std::max(worst, model_worst);
    detail += fmt::format("{} {:.1e}; ", baseline_name(kind), model_worst);
  };
  for (auto kind : {BaselineKind::RW, BaselineKind::RWPlusMinus, BaselineKind::RWKappa}) {
    // Simulate with one parameter draw and score with another so the pairs
    // cover mismatched (dataset, theta) combinations too.
    const auto agents = gen_bandit_agents(kind, 20, 150, {0.2, 0.8}, derive_seed(kSeed, baseline_name(kind)));
    Rng rng(derive_seed(kSeed, fmt::format("{}-theta", baseline_name(kind))));
    std::vector<std::vector<double>> thetas;
    for (std::size_t i = 0; i < 20; ++i) {
      thetas.push_back(i % 2 == 0 ? agents.true_params[i] : sample_parameters(baseline_parameters(kind), rng));
    }
    check(kind, agents.dataset, thetas);
  }
  DecisionProblemOptions options;
  options.n_features = 4;
  options.scale = FeatureScale::Binary;
  options.validities = {0.9, 0.8, 0.7, 0.6};
  options.seed = kSeed;
  const auto pwadd = gen_agents(BaselineKind::PWADD, gen_decision_problems(options), 20, 80, kSeed);
  check(BaselineKind::PWADD, pwadd.dataset, pwadd.true_params);
  return {worst < 1e-9, detail + fmt::format("max |dNLL| {:.1e} (limit 1e-9)", worst)};
}

Outcome criterion5() {
  constexpr std::size_t kSamples = 1'000'000;
  bool ok = true;
  std::string detail;

  Matrix symmetric;
  for (int i = 0; i < 20; ++i) symmetric.push_back({-50.0 - i, -50.0 - i});
  const auto sym = exceedance_probability(symmetric, 2, kSamples, kSeed);
  const bool sym_ok = std::abs(sym.exceedance[0] - 0.5) <= 0.01 && std::abs(sym.exceedance[1] - 0.5) <= 0.01;
  ok = ok && sym_ok;
  detail += fmt::format("symmetric [{:.4f}, {:.4f}]; ", sym.exceedance[0], sym.exceedance[1]);

  Matrix dominance;
  for (int i = 0; i < 20; ++i) dominance.push_back({-40.0, -80.0, -75.0});
  const auto dom = exceedance_probability(dominance, 3, kSamples, kSeed);
  ok = ok && dom.exceedance[0] >= 0.99;
  detail += fmt::format("dominant {:.4f}; ", dom.exceedance[0]);

  Rng rng(derive_seed(kSeed, "exceedance"));
  Matrix mixed;
  for (int i = 0; i < 30; ++i) mixed.push_back({-rng.uniform(30, 60), -rng.uniform(30, 60), -rng.uniform(30, 60)});
  const auto base = exceedance_probability(mixed, 3, kSamples, kSeed);
  const double total = std::accumulate(base.exceedance.begin(), base.exceedance.end(), 0.0);
  ok = ok && std::abs(total - 1.0) <= 1e-3;
  detail += fmt::format("sum {:.6f}; ", total);

  const std::vector<std::size_t> perm{2, 0, 1};
  Matrix permuted;
  for (const auto& row : mixed) permuted.push_back({row[perm[0]], row[perm[1]], row[perm[2]]});
  const auto swapped = exceedance_probability(permuted, 3, kSamples, kSeed);
  bool equivariant = true;
  for (std::size_t m = 0; m < 3; ++m) equivariant = equivariant && swapped.exceedance[m] == base.exceedance[perm[m]];
  ok = ok && equivariant;
  detail += fmt::format("permutation equivariance {}", equivariant ? "exact" : "broken");
  return {ok, detail};
}

Outcome criterion6() {
  const auto task = twostep_task(200, false);
  const auto mb = gen_twostep_agents(50, std::vector<double>{0.5, 0.5, 0.5, 1.0, 8.0, 8.0, 0.0}, kSeed, task);
  const auto mb_table = pool(ppc_planning(mb.dataset));
  const double mb_effect = mb_table.at(true, true) - mb_table.at(true, false);
  const auto mf = gen_twostep_agents(50, std::vector<double>{0.5, 0.5, 1.0, 0.0, 8.0, 8.0, 0.0}, kSeed, task);
  const auto mf_table = pool(ppc_planning(mf.dataset));
  const double mf_effect = mf_table.at(true, true) - mf_table.at(true, false);

  const std::vector<int> set_sizes{3, 6};
  const auto wm_task = rlwm_task(set_sizes, 6, kSeed);
  const auto wm = gen_rlwm_agents(200, std::vector<double>{0.1, 0.1, 0.3, 0.9, 0.05, 5.0}, kSeed, wm_task);
  auto curves = pool(ppc_rlwm(wm.dataset, rlwm_correct_map(wm_task, natural_length(wm_task))));
  const double gap = curves[3][1].value() - curves[6][1].value();

  const bool ok = mb_effect > 0.05 && std::abs(mf_effect) < 0.02 && gap >= 0.05;
  return {ok, fmt::format("model-based stay difference {:.3f} (> 0.05) over {} transitions; model-free {:.3f} "
                          "(|.| < 0.02); RLWM iteration-2 accuracy ss3 {:.3f} vs ss6 {:.3f}, gap {:.3f} (>= 0.05)",
                          mb_effect, mb_table.stay[1][1].n + mb_table.stay[1][0].n + mb_table.stay[0][1].n +
                                         mb_table.stay[0][0].n,
                          mf_effect, curves[3][1].value(), curves[6][1].value(), gap)};
}

pl::RunConfig bandit_run_config(Metric metric) {
  BanditTask task;
  task.feedback = Feedback::Full;
  pl::RunConfig config;
  config.dataset = gen_agents(BaselineKind::RWPlusMinus, task, 30, 150, kSeed, std::vector<double>{0.9, 0.05, 8.0}).dataset;
  config.split.seed = kSeed;
  config.metric = metric;
  config.seed = kSeed;
  config.fit.restarts = 4;
  config.baselines = {BaselineKind::RW, BaselineKind::RWKappa};
  config.mc_samples = 20'000;
  config.sleeper = [](std::chrono::milliseconds) {};
  return config;
}

struct ScriptedRun {
  pl::RunResult result;
  std::string bytes;
};

ScriptedRun scripted_run(Metric metric) {
  const auto config = bandit_run_config(metric);
  pl::ScriptedEngine engine(pl::progressive_bandit_script(config.iterations));
  auto result = pl::run(config, engine);
  auto bytes = pl::serialize(result);
  return {std::move(result), std::move(bytes)};
}

bool is_two_rate_program(const pl::RunResult& r) {
  return r.best_param_names.size() == 3 &&
         std::any_of(r.best_param_names.begin(), r.best_param_names.end(),
                     [](const std::string& n) { return n.starts_with("lr_gain_"); }) &&
         std::any_of(r.best_param_names.begin(), r.best_param_names.end(),
                     [](const std::string& n) { return n.starts_with("lr_loss_"); });
}

std::string running_minimum(const pl::RunResult& r, bool* non_increasing) {
  std::string trace;
  *non_increasing = true;
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& it : r.iterations) {
    *non_increasing = *non_increasing && it.best_score <= previous;
    previous = it.best_score;
    trace += fmt::format("{}{:.2f}", trace.empty() ? "" : " ", it.best_score);
  }
  return trace;
}

std::string bic_run_source;

Outcome criterion7() {
  const auto first = scripted_run(Metric::BIC);
  const auto second = scripted_run(Metric::BIC);
  const auto& r = first.result;
  bool non_increasing = false;
  const auto trace = running_minimum(r, &non_increasing);
  const bool ten = r.iterations.size() == 10;
  const bool winner = is_two_rate_program(r);
  const auto config = bandit_run_config(Metric::BIC);
  const auto test = split(config.dataset, config.split).test;
  const auto leaks = pl::prompt_leaks(r.prompts(), test, config.prompt_trials);
  const bool reproducible = first.bytes == second.bytes;
  bic_run_source = r.best_source;
  return {ten && non_increasing && winner && leaks.empty() && reproducible,
          fmt::format("running minimum BIC [{}]; winner parameters [{}]; {} prompt leaks of {} test participants; "
                      "RunResult {} bytes, reruns {}",
                      trace, fmt::join(r.best_param_names, ", "), leaks.size(), test.participants.size(),
                      first.bytes.size(), reproducible ? "identical" : "differ")};
}

Outcome criterion8() {
  auto config = bandit_run_config(Metric::BIC);
  const pl::EngineFactory factory = [&](std::uint64_t seed) {
    return std::make_unique<pl::AdaptiveMockEngine>(pl::bandit_ladder(), seed, config.candidates_per_iteration);
  };
  const auto report = pl::ablate(config, {"feedback", "data", "description", "template"}, factory);
  const pl::AblationRow* feedback = nullptr;
  bool largest = true;
  std::string detail = fmt::format("full {:.2f}; ", report.full_mean_test_score);
  for (const auto& row : report.rows) {
    if (row.component == "feedback") feedback = &row;
    detail += fmt::format("-{} {:+.2f} (p {:.3g}); ", row.component, row.mean_delta, row.test.p_value);
  }
  for (const auto& row : report.rows) {
    if (&row != feedback && feedback && row.mean_delta >= feedback->mean_delta) largest = false;
  }
  return {report.rows.size() == 4 && feedback && largest, detail + "mean test-BIC change per ablation"};
}

Outcome criterion9() {
  const auto r = scripted_run(Metric::AIC).result;
  bool non_increasing = false;
  const auto trace = running_minimum(r, &non_increasing);
  const bool same = !bic_run_source.empty() && r.best_source == bic_run_source;
  return {r.iterations.size() == 10 && non_increasing && same,
          fmt::format("running minimum AIC [{}]; winner parameters [{}]; {} the BIC run's winner", trace,
                      fmt::join(r.best_param_names, ", "), same ? "same as" : "differs from")};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
  int failures = 0;
  for (const auto& [id, check] : criteria) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("threw: {}", e.what())};
    }
    failures += !outcome.pass;
    fmt::print("{} criterion {}: {} [{:.1f} s]\n", outcome.pass ? "PASS" : "FAIL", id, outcome.detail,
               seconds_since(start));
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
