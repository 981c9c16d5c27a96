#include "cogmod/fitting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cogmod/error.hpp"

namespace cogmod {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, std::span<const double> x) {
  try {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  } catch (const Error&) {
    return kInf;
  }
}

struct Vertex {
  std::vector<double> x;
  double f;
};

}  // namespace

std::string_view to_string(Metric metric) noexcept { return metric == Metric::BIC ? "bic" : "aic"; }

Metric parse_metric(std::string_view text) {
  if (text == "bic" || text == "BIC") return Metric::BIC;
  if (text == "aic" || text == "AIC") return Metric::AIC;
  throw Error(ErrorKind::ConfigError, fmt::format("unknown metric '{}'", text));
}

double bic(double nll, std::size_t k, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::DomainError, "BIC needs at least one observation");
  return 2.0 * nll + static_cast<double>(k) * std::log(static_cast<double>(n));
}

double aic(double nll, std::size_t k) { return 2.0 * nll + 2.0 * static_cast<double>(k); }

LocalSearchResult minimize_in_box(const Objective& f, std::span<const double> lower, std::span<const double> upper,
                                  std::span<const double> start, const FitOptions& options) {
  const std::size_t n = start.size();
  int evaluations = 0;
  auto project = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  };
  auto evaluate = [&](std::vector<double> x) {
    project(x);
    ++evaluations;
    const double v = safe_eval(f, x);
    return Vertex{std::move(x), v};
  };

  std::vector<double> x0(start.begin(), start.end());
  if (n == 0) {
    auto v = evaluate(x0);
    return {v.x, v.f, evaluations, true};
  }

  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  simplex.push_back(evaluate(x0));
  for (std::size_t i = 0; i < n; ++i) {
    auto x = simplex[0].x;
    const double step = 0.1 * (upper[i] - lower[i]);
    x[i] = x[i] + step <= upper[i] ? x[i] + step : x[i] - step;
    simplex.push_back(evaluate(std::move(x)));
  }

  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  bool converged = false;
  std::vector<double> centroid(n);
  auto along = [&](const std::vector<double>& from, double coefficient) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + coefficient * (from[i] - centroid[i]);
    return x;
  };

  while (evaluations < options.max_evaluations) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    const auto& best = simplex.front();
    double f_spread = 0.0;
    double x_spread = 0.0;
    for (std::size_t v = 1; v <= n; ++v) {
      f_spread = std::max(f_spread, std::abs(simplex[v].f - best.f));
      for (std::size_t i = 0; i < n; ++i) {
        const double range = upper[i] - lower[i];
        x_spread = std::max(x_spread, std::abs(simplex[v].x[i] - best.x[i]) / (range > 0 ? range : 1.0));
      }
    }
    if (std::isfinite(best.f) && f_spread <= options.ftol && x_spread <= options.xtol) {
      converged = true;
      break;
    }
    if (!std::isfinite(best.f) && x_spread <= options.xtol) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i] / static_cast<double>(n);
    }
    auto& worst = simplex.back();
    const double second_worst = simplex[n - 1].f;

    Vertex reflected = evaluate(along(worst.x, -1.0));
    if (reflected.f < best.f) {
      Vertex expanded = evaluate(along(worst.x, -2.0));
      worst = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
      continue;
    }
    if (reflected.f < second_worst) {
      worst = std::move(reflected);
      continue;
    }
    const bool outside = reflected.f < worst.f;
    Vertex contracted = evaluate(along(outside ? reflected.x : worst.x, 0.5));
    if (contracted.f < (outside ? reflected.f : worst.f)) {
      worst = std::move(contracted);
      continue;
    }
    for (std::size_t v = 1; v <= n; ++v) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
      simplex[v] = evaluate(std::move(x));
    }
  }
  std::stable_sort(simplex.begin(), simplex.end(), by_value);
  return {simplex.front().x, simplex.front().f, evaluations, converged};
}

MultiStartResult minimize_multistart(const Objective& f, const ParameterSpec& spec, const FitOptions& options) {
  const auto lower = spec.lower();
  const auto upper = spec.upper();
  Rng rng(options.seed);
  MultiStartResult out;
  out.value = kInf;
  int failures = 0;
  std::string last_error;
  const int starts = std::max(0, options.restarts) + 1;
  for (int r = 0; r < starts; ++r) {
    std::vector<double> x0 = spec.center();
    if (r > 0) {
      for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = rng.uniform(lower[i], upper[i]);
    }
    bool start_failed = false;
    Objective guarded = [&](std::span<const double> x) {
      try {
        return f(x);
      } catch (const Error& e) {
        start_failed = true;
        last_error = e.what();
        throw;
      }
    };
    auto local = minimize_in_box(guarded, lower, upper, x0, options);
    if (start_failed && !std::isfinite(local.value)) ++failures;
    out.restart_values.push_back(local.value);
    if (local.value < out.value) {
      out.value = local.value;
      out.x = std::move(local.x);
      out.converged = local.converged;
    }
  }
  if (failures == starts) throw Error(ErrorKind::AllRestartsFailed, fmt::format("every start failed; last error: {}", last_error));
  if (!std::isfinite(out.value)) throw Error(ErrorKind::NonFiniteObjective, "no start reached a finite objective");
  return out;
}

FitResult fit_one(const Model& model, ParadigmKind kind, const ParticipantData& participant, const FitOptions& options) {
  FitResult result;
  result.model_id = model.id();
  result.participant_id = participant.participant_id;
  result.k = model.parameters().size();
  result.n_obs = observation_count(participant);
  if (!model.supports(kind)) {
    throw Error(ErrorKind::ParadigmMismatch, fmt::format("model '{}' cannot be applied to {} data", model.id(), to_string(kind)));
  }
  FitOptions local = options;
  local.seed = derive_seed(options.seed, participant.participant_id);
  auto objective = [&](std::span<const double> theta) { return negative_log_likelihood(model, kind, participant, theta); };
  auto best = minimize_multistart(objective, model.parameters(), local);
  result.theta_hat = std::move(best.x);
  result.nll = best.value;
  result.restart_nlls = std::move(best.restart_values);
  result.n_restarts = result.restart_nlls.size();
  result.bic = bic(result.nll, result.k, result.n_obs);
  result.aic = aic(result.nll, result.k);
  result.converged = true;
  return result;
}

std::vector<FitResult> fit_all(const Model& model, const Dataset& dataset, const FitOptions& options,
                               unsigned parallelism) {
  if (dataset.participants.empty()) throw Error(ErrorKind::EmptyDataset, "no participants to fit");
  if (!model.supports(dataset.kind)) {
    throw Error(ErrorKind::ParadigmMismatch,
                fmt::format("model '{}' cannot be applied to {} data", model.id(), to_string(dataset.kind)));
  }
  const std::size_t count = dataset.participants.size();
  std::vector<FitResult> results(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      const auto& participant = dataset.participants[i];
      try {
        results[i] = fit_one(model, dataset.kind, participant, options);
      } catch (const Error& e) {
        FitResult failed;
        failed.model_id = model.id();
        failed.participant_id = participant.participant_id;
        failed.k = model.parameters().size();
        failed.n_obs = observation_count(participant);
        failed.nll = kInf;
        failed.bic = kInf;
        failed.aic = kInf;
        failed.error = e.what();
        results[i] = std::move(failed);
      }
    }
  };
  if (parallelism == 0) parallelism = std::max(1u, std::thread::hardware_concurrency());
  const auto threads = static_cast<unsigned>(std::min<std::size_t>(parallelism, count));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return results;
}

namespace {

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

double number_from(const nlohmann::json& j) { return j.is_null() ? kInf : j.get<double>(); }

}  // namespace

void to_json(nlohmann::json& j, const FitResult& fit) {
  nlohmann::json restarts = nlohmann::json::array();
  for (double v : fit.restart_nlls) restarts.push_back(number_or_null(v));
  j = nlohmann::json{{"model", fit.model_id},
                     {"participant", fit.participant_id},
                     {"theta", fit.theta_hat},
                     {"nll", number_or_null(fit.nll)},
                     {"bic", number_or_null(fit.bic)},
                     {"aic", number_or_null(fit.aic)},
                     {"n_obs", fit.n_obs},
                     {"k", fit.k},
                     {"n_restarts", fit.n_restarts},
                     {"converged", fit.converged},
                     {"restart_nlls", restarts}};
  if (!fit.error.empty()) j["error"] = fit.error;
}

void from_json(const nlohmann::json& j, FitResult& fit) {
  fit.model_id = j.at("model").get<std::string>();
  fit.participant_id = j.at("participant").get<std::string>();
  fit.theta_hat = j.at("theta").get<std::vector<double>>();
  fit.nll = number_from(j.at("nll"));
  fit.bic = number_from(j.at("bic"));
  fit.aic = number_from(j.at("aic"));
  fit.n_obs = j.at("n_obs").get<std::size_t>();
  fit.k = j.at("k").get<std::size_t>();
  fit.n_restarts = j.at("n_restarts").get<std::size_t>();
  fit.converged = j.at("converged").get<bool>();
  fit.restart_nlls.clear();
  for (const auto& v : j.at("restart_nlls")) fit.restart_nlls.push_back(number_from(v));
  fit.error = j.value("error", std::string{});
}

std::string fits_to_csv(std::span<const FitResult> fits) {
  std::size_t width = 0;
  for (const auto& f : fits) width = std::max(width, f.theta_hat.size());
  std::string out = "model,participant,nll,bic,aic,k,n";
  for (std::size_t i = 0; i < width; ++i) out += fmt::format(",theta{}", i + 1);
  out += '\n';
  for (const auto& f : fits) {
    out += fmt::format("{},{},{},{},{},{},{}", f.model_id, f.participant_id, f.nll, f.bic, f.aic, f.k, f.n_obs);
    for (std::size_t i = 0; i < width; ++i) {
      out += ',';
      if (i < f.theta_hat.size()) out += fmt::format("{}", f.theta_hat[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace cogmod
