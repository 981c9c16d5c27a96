#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cogmod/baselines.hpp"
#include "cogmod/comparison.hpp"
#include "cogmod/error.hpp"
#include "cogmod/fitting.hpp"
#include "cogmod/library.hpp"
#include "cogmod/mdl.hpp"
#include "cogmod/pipeline.hpp"
#include "cogmod/ppc.hpp"
#include "cogmod/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cogmod;

namespace {

struct Common {
  fs::path out;
  bool json_summary = false;
  unsigned jobs = 0;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--out", common.out, "Directory that receives every output file")->required();
  cmd->add_flag("--json", common.json_summary, "Print a one-line JSON summary on stdout");
  cmd->add_option("--jobs", common.jobs, "Fitting threads (0 = all cores)");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, fmt::format("cannot read {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, fmt::format("cannot write {}", path.string()));
  out << text;
}

void prepare(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

void report(const Common& common, json summary, std::string_view human) {
  if (common.json_summary) {
    std::cout << summary.dump() << "\n";
  } else {
    std::cout << human;
  }
}

Dataset load(const fs::path& path, std::string_view kind) {
  return load_dataset(path, parse_paradigm_kind(kind), format_from_path(path));
}

/// A baseline name, a shipped transcription ("mdl:rw"), or a path to an .mdl file.
std::unique_ptr<Model> resolve_model(const std::string& spec, ParadigmKind kind) {
  std::unique_ptr<Model> model;
  if (spec.starts_with("mdl:")) {
    model = load_shipped(spec.substr(4), kind);
  } else if (fs::path(spec).extension() == ".mdl") {
    model = std::make_unique<mdl::ProgramModel>(mdl::parse(read_file(spec)), kind, fs::path(spec).stem().string());
  } else {
    model = make_baseline(parse_baseline(spec));
  }
  if (!model->supports(kind)) {
    throw Error(ErrorKind::ParadigmMismatch, fmt::format("model '{}' does not apply to {} data", spec, to_string(kind)));
  }
  return model;
}

struct EnvOptions {
  std::string name = "bandit";
  std::vector<double> contingencies{0.2, 0.8};
  int rlwm_blocks = 6;
  std::uint64_t seed = 0;
};

void add_env_options(CLI::App* cmd, EnvOptions& env) {
  cmd->add_option("--env", env.name,
                  "bandit, bandit-full, twostep, twostep-drift, rlwm, decision or decision-binary")
      ->capture_default_str();
  cmd->add_option("--contingencies", env.contingencies, "Bandit reward probabilities")->expected(2);
  cmd->add_option("--rlwm-blocks", env.rlwm_blocks, "Number of RLWM blocks");
}

TaskEnvironment make_environment(const EnvOptions& o) {
  if (o.name == "bandit" || o.name == "bandit-full") {
    BanditTask task;
    task.blocks = {BanditBlock{{o.contingencies[0], o.contingencies[1]}, 150, "main"}};
    task.feedback = o.name == "bandit-full" ? Feedback::Full : Feedback::Partial;
    return task;
  }
  if (o.name == "twostep") return twostep_task(200, false);
  if (o.name == "twostep-drift") return twostep_task(200, true);
  if (o.name == "rlwm") {
    const std::vector<int> set_sizes{3, 6};
    return rlwm_task(set_sizes, o.rlwm_blocks, o.seed);
  }
  if (o.name == "decision" || o.name == "decision-binary") {
    DecisionProblemOptions options;
    options.seed = o.seed;
    if (o.name == "decision-binary") {
      options.n_features = 4;
      options.scale = FeatureScale::Binary;
      options.validities = {0.9, 0.8, 0.7, 0.6};
    }
    return gen_decision_problems(options);
  }
  throw Error(ErrorKind::ConfigError, fmt::format("unknown environment '{}'", o.name));
}

std::vector<FitResult> read_fits(const fs::path& path) {
  const auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_array()) throw Error(ErrorKind::SchemaMismatch, fmt::format("{} is not a fit list", path.string()));
  return j.get<std::vector<FitResult>>();
}

int cmd_fit(const Common& c, const std::string& model_spec, const fs::path& data_path, const std::string& kind,
            int restarts, const std::string& metric, std::uint64_t seed) {
  const auto data = load(data_path, kind);
  const auto model = resolve_model(model_spec, data.kind);
  FitOptions options;
  options.restarts = restarts;
  options.seed = seed;
  const auto fits = fit_all(*model, data, options, c.jobs);
  prepare(c.out);
  write_file(c.out / "fits.json", json(fits).dump(2) + "\n");
  write_file(c.out / "fits.csv", fits_to_csv(fits));
  const Metric m = parse_metric(metric);
  double total = 0.0;
  std::size_t ok = 0;
  for (const auto& f : fits) {
    if (!f.converged) continue;
    total += f.score(m);
    ++ok;
  }
  const double mean = ok ? total / static_cast<double>(ok) : std::nan("");
  report(c,
         {{"command", "fit"}, {"model", model->id()}, {"participants", fits.size()}, {"failed", fits.size() - ok},
          {"metric", std::string(to_string(m))}, {"mean", ok ? json(mean) : json(nullptr)}, {"out", c.out.string()}},
         fmt::format("fitted {} to {} participants ({} failed); mean {} {:.2f}\n", model->id(), fits.size(),
                     fits.size() - ok, to_string(m), mean));
  return 0;
}

int cmd_compare(const Common& c, const std::vector<fs::path>& dirs, const std::string& metric, std::size_t mc,
                std::uint64_t seed) {
  std::vector<std::pair<std::string, std::vector<FitResult>>> table;
  for (const auto& dir : dirs) {
    const auto file = fs::is_directory(dir) ? dir / "fits.json" : dir;
    std::map<std::string, std::vector<FitResult>> by_model;
    std::vector<std::string> order;
    for (auto& f : read_fits(file)) {
      if (!by_model.contains(f.model_id)) order.push_back(f.model_id);
      by_model[f.model_id].push_back(std::move(f));
    }
    for (const auto& id : order) table.emplace_back(id, std::move(by_model[id]));
  }
  CompareOptions options;
  options.metric = parse_metric(metric);
  options.mc_samples = mc;
  options.seed = seed;
  const auto result = compare(table, options);
  prepare(c.out);
  write_file(c.out / "comparison.json", json(result).dump(2) + "\n");
  write_file(c.out / "scores.csv", scores_to_csv(result));
  std::string human;
  for (std::size_t m = 0; m < result.models.size(); ++m) {
    human += fmt::format("{:<16} mean {} {:8.2f} (SEM {:.2f})  exceedance {:.3f}\n", result.models[m],
                         to_string(result.metric), result.mean[m], result.sem[m], result.exceedance[m]);
  }
  report(c,
         {{"command", "compare"}, {"models", result.models}, {"mean", result.mean}, {"exceedance", result.exceedance},
          {"participants", result.participants.size()}, {"out", c.out.string()}},
         human);
  return 0;
}

int cmd_generate(const Common& c, const fs::path& config_path, std::size_t runs_override) {
  auto config = pipeline::load_pipeline_config(config_path);
  config.run.jobs = c.jobs;
  const std::size_t runs = runs_override ? runs_override : config.runs;
  const auto factory = pipeline::engine_factory(config.engine, config.run.candidates_per_iteration);
  const auto results = pipeline::run_many(config.run, runs, factory);
  prepare(c.out);
  json summary{{"command", "generate"}, {"runs", json::array()}, {"out", c.out.string()}};
  std::string human;
  for (const auto& r : results) {
    pipeline::write_archive(r, c.out / r.run_id);
    double test_mean = 0.0;
    if (!r.comparison.mean.empty()) test_mean = r.comparison.mean.front();
    summary["runs"].push_back({{"run_id", r.run_id},
                               {"best_validation_score", r.best_validation_score},
                               {"best_param_names", r.best_param_names},
                               {"test_mean", test_mean}});
    human += fmt::format("{}: best validation {} {:.2f}, test {:.2f}, parameters [{}]\n", r.run_id,
                         to_string(r.metric), r.best_validation_score, test_mean, fmt::join(r.best_param_names, ", "));
  }
  report(c, summary, human);
  return 0;
}

int cmd_simulate(const Common& c, const std::string& model_spec, const EnvOptions& env_options, std::size_t n,
                 int trials, const std::string& format) {
  const auto env = make_environment(env_options);
  const ParadigmKind kind = paradigm_kind(env);
  const auto model = resolve_model(model_spec, kind);
  const int length = trials > 0 ? trials : natural_length(env);
  Dataset data;
  data.kind = kind;
  data.provenance = fmt::format("simulated {} on {} (seed {})", model->id(), env_options.name, env_options.seed);
  json truth = json::array();
  for (std::size_t a = 0; a < n; ++a) {
    Rng rng(derive_seed(env_options.seed, a));
    const auto theta = sample_parameters(model->parameters(), rng);
    const auto id = fmt::format("{}_{:03}", model->id(), a);
    data.participants.push_back(simulate(*model, env, theta, length, rng.next(), id));
    json row{{"participant_id", id}};
    const auto names = model->parameters().names();
    for (std::size_t i = 0; i < names.size(); ++i) row[names[i]] = theta[i];
    truth.push_back(row);
  }
  prepare(c.out);
  const auto file = c.out / (format == "json" ? "data.json" : "data.csv");
  save_dataset(data, file, format == "json" ? DataFormat::Json : DataFormat::Csv);
  write_file(c.out / "true_params.json", truth.dump(2) + "\n");
  report(c,
         {{"command", "simulate"}, {"model", model->id()}, {"kind", to_string(kind)}, {"participants", n},
          {"trials", length}, {"data", file.string()}},
         fmt::format("simulated {} participants x {} trials of {} -> {}\n", n, length, model->id(), file.string()));
  return 0;
}

int cmd_recover(const Common& c, const std::string& study, std::uint64_t seed, std::size_t n_agents, int restarts) {
  prepare(c.out);
  if (study == "bandit") {
    RecoveryConfig config;
    config.seed = seed;
    config.n_agents = n_agents;
    config.fit.restarts = restarts;
    config.jobs = c.jobs;
    const auto r = recovery_study(config);
    write_file(c.out / "recovery.csv", recovery_to_csv(r));
    write_file(c.out / "recovery.json", json(r).dump(2) + "\n");
    json acc = json::object();
    std::string human;
    for (const auto& [model, a] : r.accuracy) {
      acc[model] = a ? json(*a) : json(nullptr);
      human += fmt::format("{}: identification accuracy {:.3f}, ground-truth mean BIC {:.2f} (SEM {:.2f})\n", model,
                           a.value_or(std::nan("")), r.mean_bic_true.at(model), r.sem_bic_true.at(model));
    }
    report(c, {{"command", "recover"}, {"study", study}, {"accuracy", acc}, {"mean_bic_true", r.mean_bic_true}}, human);
    return 0;
  }
  if (study == "heuristics") {
    HeuristicStudyConfig config;
    config.seed = seed;
    const auto r = heuristic_study(config);
    write_file(c.out / "heuristics.csv", heuristic_study_to_csv(r));
    write_file(c.out / "heuristics.json", json(r).dump(2) + "\n");
    json rows = json::array();
    std::string human;
    for (const auto& s : r.summary) {
      rows.push_back({{"heuristic", s.heuristic}, {"noise", s.noise}, {"accuracy", s.mean_accuracy}});
      human += fmt::format("{:<9} noise {:.2f}: accuracy {:.3f}\n", s.heuristic, s.noise, s.mean_accuracy);
    }
    report(c, {{"command", "recover"}, {"study", study}, {"summary", rows}}, human);
    return 0;
  }
  throw CLI::ValidationError("--study", "expected bandit or heuristics");
}

std::string ppc_table(const Dataset& data, const TaskEnvironment& env) {
  switch (data.kind.paradigm) {
    case Paradigm::DecisionMaking: return to_csv(ppc_decision(data));
    case Paradigm::Planning: return to_csv(ppc_planning(data));
    case Paradigm::Learning: {
      const auto* task = std::get_if<BanditTask>(&env);
      if (!task) throw Error(ErrorKind::MissingLabels, "learning data needs a bandit --env for block labels");
      int longest = 0;
      for (const auto& p : data.participants) longest = std::max(longest, static_cast<int>(p.trials.size()));
      return to_csv(ppc_learning(data, bandit_block_info(*task, longest)));
    }
    case Paradigm::WorkingMemory: {
      const auto* task = std::get_if<RlwmTask>(&env);
      if (!task) throw Error(ErrorKind::MissingCorrectMap, "working-memory data needs --env rlwm with the schedule seed");
      return to_csv(ppc_rlwm(data, rlwm_correct_map(*task, natural_length(*task))));
    }
  }
  return {};
}

int cmd_ppc(const Common& c, const fs::path& data_path, const std::vector<fs::path>& sims, const std::string& kind,
            const EnvOptions& env_options) {
  const auto env = make_environment(env_options);
  prepare(c.out);
  const auto data = load(data_path, kind);
  write_file(c.out / "ppc_data.csv", ppc_table(data, env));
  json files = json::array({(c.out / "ppc_data.csv").string()});
  for (std::size_t i = 0; i < sims.size(); ++i) {
    const auto name = sims.size() == 1 ? std::string("ppc_sim.csv") : fmt::format("ppc_sim_{}.csv", i + 1);
    write_file(c.out / name, ppc_table(load(sims[i], kind), env));
    files.push_back((c.out / name).string());
  }
  report(c, {{"command", "ppc"}, {"files", files}}, fmt::format("wrote {} table(s) to {}\n", files.size(), c.out.string()));
  return 0;
}

int cmd_ablate(const Common& c, const fs::path& config_path, const std::vector<std::string>& components) {
  auto config = pipeline::load_pipeline_config(config_path);
  config.run.jobs = c.jobs;
  const auto chosen = components.empty() ? config.ablations : components;
  const auto factory = pipeline::engine_factory(config.engine, config.run.candidates_per_iteration);
  const auto r = pipeline::ablate(config.run, chosen, factory);
  prepare(c.out);
  write_file(c.out / "ablation.csv", pipeline::ablation_to_csv(r));
  write_file(c.out / "ablation.json", json(r).dump(2) + "\n");
  std::string human = fmt::format("full prompt: mean test {} {:.2f}\n", to_string(r.metric), r.full_mean_test_score);
  for (const auto& row : r.rows) {
    human += fmt::format("without {:<12} mean {:.2f}  delta {:+.2f}  p {:.3g}\n", row.component, row.mean_test_score,
                         row.mean_delta, row.test.p_value);
  }
  report(c, {{"command", "ablate"}, {"report", json(r)}}, human);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cogmod: cognitive model fitting, comparison and guided model generation"};
  app.require_subcommand(1);

  Common common;

  std::string model_spec;
  fs::path data_path;
  std::string kind;
  int restarts = 20;
  std::string metric = "bic";
  std::uint64_t seed = 0;
  auto* fit = app.add_subcommand("fit", "Fit a model to every participant of a dataset");
  fit->add_option("--model", model_spec, "Baseline name, mdl:<name> or a .mdl file")->required();
  fit->add_option("--data", data_path, "CSV or JSON dataset")->required()->check(CLI::ExistingFile);
  fit->add_option("--kind", kind, "decision, learning-partial, learning-full, planning or wm")->required();
  fit->add_option("--restarts", restarts, "Random restarts")->capture_default_str();
  fit->add_option("--metric", metric, "bic or aic")->capture_default_str();
  fit->add_option("--seed", seed, "Restart seed")->capture_default_str();
  add_common(fit, common);

  std::vector<fs::path> fit_dirs;
  std::size_t mc_samples = 1'000'000;
  auto* cmp = app.add_subcommand("compare", "Compare models from earlier fit outputs");
  cmp->add_option("--fits", fit_dirs, "fit output directories or fits.json files")->required();
  cmp->add_option("--metric", metric, "bic or aic")->capture_default_str();
  cmp->add_option("--samples", mc_samples, "Dirichlet samples for exceedance probabilities")->capture_default_str();
  cmp->add_option("--seed", seed, "Sampling seed")->capture_default_str();
  add_common(cmp, common);

  fs::path config_path;
  std::size_t runs = 0;
  auto* gen = app.add_subcommand("generate", "Run the guided model-generation pipeline");
  gen->add_option("--config", config_path, "JSON pipeline configuration")->required()->check(CLI::ExistingFile);
  gen->add_option("--runs", runs, "Independent runs (overrides the configuration)");
  add_common(gen, common);

  EnvOptions env;
  std::size_t n_agents = 100;
  int trials = 0;
  std::string format = "csv";
  auto* sim = app.add_subcommand("simulate", "Simulate synthetic participants");
  sim->add_option("--model", model_spec, "Baseline name, mdl:<name> or a .mdl file")->required();
  add_env_options(sim, env);
  sim->add_option("--n", n_agents, "Participants")->capture_default_str();
  sim->add_option("--trials", trials, "Trials per participant (0 = one pass of the schedule)");
  sim->add_option("--seed", env.seed, "Seed")->capture_default_str();
  sim->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  add_common(sim, common);

  std::string study;
  auto* rec = app.add_subcommand("recover", "Parameter and model recovery studies");
  rec->add_option("--study", study, "bandit (delta-rule learners) or heuristics (decision rules)")
      ->required()
      ->check(CLI::IsMember({"bandit", "heuristics"}));
  rec->add_option("--seed", seed, "Seed")->capture_default_str();
  rec->add_option("--n", n_agents, "Agents per generating model")->capture_default_str();
  rec->add_option("--restarts", restarts, "Random restarts")->capture_default_str();
  add_common(rec, common);

  std::vector<fs::path> sims;
  auto* ppc = app.add_subcommand("ppc", "Posterior predictive summary tables");
  ppc->add_option("--data", data_path, "Observed dataset")->required()->check(CLI::ExistingFile);
  ppc->add_option("--sim", sims, "Simulated datasets")->check(CLI::ExistingFile);
  ppc->add_option("--kind", kind, "Paradigm kind of the datasets")->required();
  add_env_options(ppc, env);
  ppc->add_option("--seed", env.seed, "Schedule seed for the rlwm environment")->capture_default_str();
  add_common(ppc, common);

  std::vector<std::string> components;
  auto* abl = app.add_subcommand("ablate", "Rerun the pipeline with prompt components removed");
  abl->add_option("--config", config_path, "JSON pipeline configuration")->required()->check(CLI::ExistingFile);
  abl->add_option("--components", components, "feedback, data, description, template, guardrails or none")
      ->delimiter(',');
  add_common(abl, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*fit) return cmd_fit(common, model_spec, data_path, kind, restarts, metric, seed);
    if (*cmp) return cmd_compare(common, fit_dirs, metric, mc_samples, seed);
    if (*gen) return cmd_generate(common, config_path, runs);
    if (*sim) {
      if (trials < 0) throw CLI::ValidationError("--trials", "must not be negative");
      return cmd_simulate(common, model_spec, env, n_agents, trials, format);
    }
    if (*rec) return cmd_recover(common, study, seed, n_agents, restarts);
    if (*ppc) return cmd_ppc(common, data_path, sims, kind, env);
    if (*abl) return cmd_ablate(common, config_path, components);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
