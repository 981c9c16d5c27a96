#include "cogmod/pipeline/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cogmod/error.hpp"
#include "cogmod/mdl.hpp"

namespace cogmod::pipeline {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::string> ids_of(const Dataset& d) {
  std::vector<std::string> out;
  for (const auto& p : d.participants) out.push_back(p.participant_id);
  return out;
}

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, fmt::format("cannot write {}", path.string()));
  out << text;
}

class IterationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CandidateRecord evaluate(const Candidate& c, const Dataset& validation, const RunConfig& config, const FitOptions& fit) {
  CandidateRecord rec;
  rec.index = c.index;
  rec.source = c.source;
  rec.param_names = c.param_names;
  rec.score = kInf;
  if (!c.accepted()) {
    rec.error = c.error;
    return rec;
  }
  try {
    mdl::ProgramModel model(*c.program, validation.kind, fmt::format("candidate{}", c.index));
    rec.fits = fit_all(model, validation, fit, config.jobs);
    double total = 0.0;
    for (const auto& f : rec.fits) {
      if (!f.converged) {
        rec.error = fmt::format("fit failed for participant '{}': {}", f.participant_id, f.error);
        return rec;
      }
      total += f.score(config.metric);
    }
    rec.score = total / static_cast<double>(rec.fits.size());
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<std::string> RunResult::prompts() const {
  std::vector<std::string> out;
  for (const auto& it : iterations) {
    for (const auto& a : it.attempts) out.push_back(a.prompt);
  }
  return out;
}

RunResult run(const RunConfig& config, ProposalEngine& engine) {
  if (config.iterations < 1) throw Error(ErrorKind::ConfigError, "at least one iteration is needed");
  const auto parts = split(config.dataset, config.split);
  if (parts.validation.participants.empty() || parts.test.participants.empty()) {
    throw Error(ErrorKind::TooFewParticipants, "the validation and test splits must both be non-empty");
  }
  const ParadigmKind kind = config.dataset.kind;

  RunResult result;
  result.run_id = config.run_id;
  result.metric = config.metric;
  result.prompt_ids = ids_of(parts.prompt);
  result.validation_ids = ids_of(parts.validation);
  result.test_ids = ids_of(parts.test);

  FitOptions fit = config.fit;
  fit.seed = derive_seed(config.seed, "fit");

  PromptSpec spec;
  spec.task_description = task_description(kind);
  spec.data_text = to_prompt_text(parts.prompt, config.prompt_participants, config.prompt_trials);
  spec.guardrails = default_guardrails(kind, config.candidates_per_iteration);
  spec.template_source = default_template(kind);
  spec.enabled = config.components;
  spec.n_candidates = config.candidates_per_iteration;

  std::vector<std::set<std::string>> history;
  std::set<std::string> used;
  double best_score = kInf;
  std::string best_source;
  std::vector<std::string> best_names;

  for (int iteration = 1; iteration <= config.iterations; ++iteration) {
    IterationLog log;
    log.iteration = iteration;
    const std::vector<std::string> used_list(used.begin(), used.end());
    log.feedback_sent = best_source.empty() ? std::string()
                                            : construct_feedback(best_source, best_score, config.metric, used_list);
    spec.feedback = log.feedback_sent.empty() ? std::nullopt : std::optional<std::string>(log.feedback_sent);
    const std::string prompt = build_prompt(spec);

    int failures = 0;
    while (true) {
      AttemptLog attempt;
      attempt.prompt = prompt;
      try {
        attempt.response = propose(prompt, engine, config.temperature, config.retry, config.sleeper);
        const auto candidates =
            extract_candidates(attempt.response, kind, history, config.distinctness, config.candidates_per_iteration);
        for (const auto& c : candidates) {
          if (!c.accepted()) continue;
          history.push_back(canonical_names(*c.program));
          used.insert(c.param_names.begin(), c.param_names.end());
        }
        for (const auto& c : candidates) attempt.candidates.push_back(evaluate(c, parts.validation, config, fit));
        if (std::none_of(attempt.candidates.begin(), attempt.candidates.end(), [](const auto& c) { return c.ok(); })) {
          throw IterationFailed("every candidate failed");
        }
      } catch (const Error& e) {
        attempt.error = e.what();
      } catch (const IterationFailed& e) {
        attempt.error = e.what();
      }
      const bool failed = !attempt.error.empty();
      const std::string cause = attempt.error;
      log.attempts.push_back(std::move(attempt));
      if (!failed) break;
      ++failures;
      if (failures >= config.max_retries) {
        throw Error(ErrorKind::RunAborted,
                    fmt::format("iteration {} failed {} times in a row; last cause: {}", iteration, failures, cause));
      }
    }
    log.retries = failures;
    for (const auto& c : log.attempts.back().candidates) {
      if (c.ok() && c.score < best_score) {
        best_score = c.score;
        best_source = c.source;
        best_names = c.param_names;
      }
    }
    log.best_source = best_source;
    log.best_score = best_score;
    result.iterations.push_back(std::move(log));
  }

  result.best_source = best_source;
  result.best_param_names = best_names;
  result.best_validation_score = best_score;
  result.used_names.assign(used.begin(), used.end());

  const mdl::ProgramModel best(mdl::parse(best_source), kind, "best");
  result.test_fits = fit_all(best, parts.test, fit, config.jobs);
  std::vector<std::pair<std::string, std::vector<FitResult>>> table{{"best", result.test_fits}};
  for (auto b : config.baselines) {
    if (!baseline_supports(b, kind)) continue;
    const auto model = make_baseline(b);
    table.emplace_back(std::string(baseline_name(b)), fit_all(*model, parts.test, fit, config.jobs));
  }
  CompareOptions compare_options;
  compare_options.metric = config.metric;
  compare_options.mc_samples = config.mc_samples;
  compare_options.seed = derive_seed(config.seed, "compare");
  result.comparison = compare(table, compare_options);
  return result;
}

std::vector<RunResult> run_many(const RunConfig& config, std::size_t n_runs, const EngineFactory& make_engine) {
  std::vector<RunResult> out;
  for (std::size_t r = 0; r < n_runs; ++r) {
    RunConfig c = config;
    c.seed = derive_seed(config.seed, r);
    c.run_id = fmt::format("{}_{:02}", config.run_id, r + 1);
    auto engine = make_engine(c.seed);
    out.push_back(run(c, *engine));
  }
  return out;
}

std::vector<std::string> prompt_leaks(const std::vector<std::string>& prompts, const Dataset& test, std::size_t max_trials) {
  std::vector<std::string> leaks;
  for (const auto& p : test.participants) {
    std::string listing;
    for (const auto& line : prompt_lines(p, test.kind, max_trials)) {
      listing += line;
      listing += '\n';
    }
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      if (prompts[i].find(p.participant_id) != std::string::npos) {
        leaks.push_back(fmt::format("prompt {} mentions test participant '{}'", i + 1, p.participant_id));
      }
      if (!listing.empty() && prompts[i].find(listing) != std::string::npos) {
        leaks.push_back(fmt::format("prompt {} contains the trials of test participant '{}'", i + 1, p.participant_id));
      }
    }
  }
  return leaks;
}

void to_json(nlohmann::json& j, const RunResult& result) {
  auto candidate_json = [](const CandidateRecord& c) {
    nlohmann::json fits = nlohmann::json::array();
    for (const auto& f : c.fits) fits.push_back(f);
    return nlohmann::json{{"index", c.index},       {"source", c.source},           {"param_names", c.param_names},
                          {"error", c.error},       {"score", number_or_null(c.score)}, {"fits", fits}};
  };
  nlohmann::json iterations = nlohmann::json::array();
  for (const auto& it : result.iterations) {
    nlohmann::json attempts = nlohmann::json::array();
    for (const auto& a : it.attempts) {
      nlohmann::json cands = nlohmann::json::array();
      for (const auto& c : a.candidates) cands.push_back(candidate_json(c));
      attempts.push_back({{"prompt", a.prompt}, {"response", a.response}, {"error", a.error}, {"candidates", cands}});
    }
    iterations.push_back({{"iteration", it.iteration},
                          {"retries", it.retries},
                          {"feedback_sent", it.feedback_sent},
                          {"best_source", it.best_source},
                          {"best_score", number_or_null(it.best_score)},
                          {"attempts", attempts}});
  }
  nlohmann::json test_fits = nlohmann::json::array();
  for (const auto& f : result.test_fits) test_fits.push_back(f);
  nlohmann::json comparison;
  to_json(comparison, result.comparison);
  j = nlohmann::json{{"run_id", result.run_id},
                     {"metric", std::string(to_string(result.metric))},
                     {"split", {{"prompt", result.prompt_ids}, {"validation", result.validation_ids}, {"test", result.test_ids}}},
                     {"iterations", iterations},
                     {"best_source", result.best_source},
                     {"best_param_names", result.best_param_names},
                     {"best_validation_score", number_or_null(result.best_validation_score)},
                     {"used_names", result.used_names},
                     {"test_fits", test_fits},
                     {"comparison", comparison}};
}

std::string serialize(const RunResult& result) {
  nlohmann::json j;
  to_json(j, result);
  return j.dump(2);
}

void write_archive(const RunResult& result, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  for (const char* sub : {"prompts", "responses", "candidates"}) {
    fs::create_directories(dir / sub, ec);
    if (ec) throw Error(ErrorKind::IoError, fmt::format("cannot create {}: {}", (dir / sub).string(), ec.message()));
  }
  std::string fits;
  int n = 0;
  for (const auto& it : result.iterations) {
    for (const auto& a : it.attempts) {
      ++n;
      const auto tag = fmt::format("{:02}", n);
      write_text(dir / "prompts" / (tag + ".txt"), a.prompt);
      write_text(dir / "responses" / (tag + ".txt"), a.response);
      for (const auto& c : a.candidates) {
        write_text(dir / "candidates" / fmt::format("{}_{}.mdl", tag, c.index), c.source);
        for (const auto& f : c.fits) {
          nlohmann::json line = f;
          line["split"] = "validation";
          line["iteration"] = it.iteration;
          line["attempt"] = n;
          line["candidate"] = c.index;
          fits += line.dump() + "\n";
        }
      }
    }
  }
  for (const auto& f : result.test_fits) {
    nlohmann::json line = f;
    line["split"] = "test";
    fits += line.dump() + "\n";
  }
  write_text(dir / "fits.jsonl", fits);
  write_text(dir / "report.json", serialize(result) + "\n");
}

AblationReport ablate(const RunConfig& config, const std::vector<std::string>& components, const EngineFactory& make_engine) {
  if (components.empty()) throw Error(ErrorKind::ConfigError, "name at least one component to ablate (or 'none')");
  auto per_participant = [&](const RunResult& r) {
    std::map<std::string, double> scores;
    for (const auto& f : r.test_fits) {
      if (f.converged) scores[f.participant_id] = f.score(config.metric);
    }
    return scores;
  };
  auto mean_of = [](const std::map<std::string, double>& m) {
    double total = 0.0;
    for (const auto& [_, v] : m) total += v;
    return m.empty() ? kInf : total / static_cast<double>(m.size());
  };

  AblationReport report;
  report.metric = config.metric;
  auto full_engine = make_engine(config.seed);
  const auto full = run(config, *full_engine);
  const auto full_scores = per_participant(full);
  report.full_mean_test_score = mean_of(full_scores);

  for (const auto& name : components) {
    RunConfig c = config;
    if (name != "none") c.components.set(parse_component(name), false);
    c.run_id = fmt::format("{}_without_{}", config.run_id, name);
    auto engine = make_engine(config.seed);
    const auto ablated = run(c, *engine);
    const auto scores = per_participant(ablated);
    AblationRow row;
    row.component = name;
    row.best_source = ablated.best_source;
    row.mean_test_score = mean_of(scores);
    std::vector<double> full_paired;
    std::vector<double> ablated_paired;
    for (const auto& [id, s] : scores) {
      auto it = full_scores.find(id);
      if (it == full_scores.end()) continue;
      full_paired.push_back(it->second);
      ablated_paired.push_back(s);
      row.deltas.push_back(s - it->second);
    }
    row.mean_delta = row.deltas.empty() ? 0.0
                                        : std::accumulate(row.deltas.begin(), row.deltas.end(), 0.0) /
                                              static_cast<double>(row.deltas.size());
    row.test = paired_t_test(full_paired, ablated_paired);
    row.test.better = "full";
    row.test.worse = "without " + name;
    report.rows.push_back(std::move(row));
  }
  return report;
}

void to_json(nlohmann::json& j, const AblationReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"component", r.component},
                    {"best_source", r.best_source},
                    {"mean_test_score", number_or_null(r.mean_test_score)},
                    {"mean_delta", r.mean_delta},
                    {"deltas", r.deltas},
                    {"t", number_or_null(r.test.t_stat)},
                    {"p", number_or_null(r.test.p_value)},
                    {"df", r.test.df}});
  }
  j = nlohmann::json{{"metric", std::string(to_string(report.metric))},
                     {"full_mean_test_score", number_or_null(report.full_mean_test_score)},
                     {"ablations", rows}};
}

std::string ablation_to_csv(const AblationReport& report) {
  std::string out = fmt::format("component,mean_test_{},mean_delta,t,p,df\n", to_string(report.metric));
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.component, r.mean_test_score, r.mean_delta, r.test.t_stat, r.test.p_value,
                       r.test.df);
  }
  return out;
}

}  // namespace cogmod::pipeline
