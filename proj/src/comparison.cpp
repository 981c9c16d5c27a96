#include "cogmod/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cogmod/error.hpp"
#include "cogmod/random.hpp"

namespace cogmod {

namespace {

// Summing in sorted order makes the result independent of the input order.
double ordered_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

double mean_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

PairedTest paired_t_test(const std::vector<double>& better, const std::vector<double>& worse) {
  if (better.size() != worse.size()) throw Error(ErrorKind::LengthMismatch, "paired samples differ in length");
  PairedTest out;
  std::vector<double> diff(better.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = worse[i] - better[i];
  out.mean_difference = mean_of(diff);
  if (diff.size() < 2) return out;
  out.df = diff.size() - 1;
  const double se = sd_of(diff) / std::sqrt(static_cast<double>(diff.size()));
  if (se == 0.0) {
    if (out.mean_difference == 0.0) {
      out.p_value = 0.5;
    } else {
      out.t_stat = out.mean_difference > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      out.p_value = out.mean_difference > 0 ? 0.0 : 1.0;
    }
    return out;
  }
  out.t_stat = out.mean_difference / se;
  boost::math::students_t dist(static_cast<double>(out.df));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.t_stat));
  return out;
}

ExceedanceResult exceedance_probability(const Matrix& log_evidence, std::size_t n_models, std::size_t mc_samples,
                                        std::uint64_t seed) {
  const std::size_t k = n_models;
  if (k == 0) throw Error(ErrorKind::DomainError, "no models to compare");
  for (const auto& row : log_evidence) {
    if (row.size() != k) throw Error(ErrorKind::LengthMismatch, "log evidence row has the wrong number of models");
    for (double x : row) {
      if (!std::isfinite(x)) throw Error(ErrorKind::NonFiniteEvidence, "log evidence must be finite");
    }
  }
  ExceedanceResult out;
  const double alpha0 = 1.0;
  std::vector<double> alpha(k, alpha0);
  std::vector<double> g(k);
  std::vector<double> beta(k);
  for (int iteration = 0; iteration < 10'000; ++iteration) {
    const double digamma_total = boost::math::digamma(ordered_sum(alpha));
    std::vector<std::vector<double>> columns(k);
    for (const auto& row : log_evidence) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < k; ++m) {
        g[m] = row[m] + boost::math::digamma(alpha[m]) - digamma_total;
        top = std::max(top, g[m]);
      }
      for (double& x : g) x = std::exp(x - top);
      const double total = ordered_sum(g);
      for (std::size_t m = 0; m < k; ++m) columns[m].push_back(g[m] / total);
    }
    double change = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      beta[m] = std::accumulate(columns[m].begin(), columns[m].end(), 0.0);
      const double next = alpha0 + beta[m];
      change += (next - alpha[m]) * (next - alpha[m]);
      alpha[m] = next;
    }
    out.iterations = iteration + 1;
    if (std::sqrt(change) < 1e-6) break;
  }
  out.alpha = alpha;
  const double alpha_total = ordered_sum(alpha);
  for (double a : alpha) out.expected_frequency.push_back(a / alpha_total);

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return alpha[a] < alpha[b]; });
  std::vector<double> wins(k, 0.0);
  if (k == 1) {
    wins[0] = 1.0;
  } else {
    Rng rng(seed);
    std::vector<std::gamma_distribution<double>> draws;
    for (std::size_t pos = 0; pos < k; ++pos) draws.emplace_back(alpha[order[pos]], 1.0);
    std::vector<double> counts(k, 0.0);
    for (std::size_t s = 0; s < mc_samples; ++s) {
      std::size_t best = 0;
      double best_value = -1.0;
      for (std::size_t pos = 0; pos < k; ++pos) {
        const double r = draws[pos](rng.engine());
        if (r > best_value) {
          best_value = r;
          best = pos;
        }
      }
      counts[best] += 1.0;
    }
    for (std::size_t pos = 0; pos < k;) {
      std::size_t end = pos;
      double group = 0.0;
      while (end < k && alpha[order[end]] == alpha[order[pos]]) group += counts[end++];
      for (std::size_t q = pos; q < end; ++q) wins[order[q]] = group / static_cast<double>(end - pos) / static_cast<double>(mc_samples);
      pos = end;
    }
  }
  out.exceedance = wins;
  return out;
}

ComparisonReport compare(const std::vector<std::pair<std::string, std::vector<FitResult>>>& fits,
                         const CompareOptions& options) {
  if (fits.empty()) throw Error(ErrorKind::DomainError, "no models to compare");
  ComparisonReport report;
  report.metric = options.metric;
  const auto& reference = fits.front().second;
  std::set<std::string> reference_ids;
  for (const auto& f : reference) reference_ids.insert(f.participant_id);
  std::vector<std::map<std::string, const FitResult*>> lookup;
  for (const auto& [model, results] : fits) {
    report.models.push_back(model);
    std::map<std::string, const FitResult*> by_id;
    for (const auto& f : results) by_id[f.participant_id] = &f;
    std::set<std::string> ids;
    for (const auto& [id, _] : by_id) ids.insert(id);
    if (ids != reference_ids || by_id.size() != results.size()) {
      throw Error(ErrorKind::ParticipantSetMismatch,
                  fmt::format("model '{}' was fit to a different participant set than '{}'", model, fits.front().first));
    }
    lookup.push_back(std::move(by_id));
  }
  for (const auto& f : reference) {
    std::vector<double> row;
    bool ok = true;
    for (const auto& by_id : lookup) {
      const FitResult& r = *by_id.at(f.participant_id);
      const double score = r.score(options.metric);
      if (!r.converged || !std::isfinite(score)) ok = false;
      row.push_back(score);
    }
    if (!ok) {
      report.excluded.push_back(f.participant_id);
      continue;
    }
    report.participants.push_back(f.participant_id);
    report.scores.push_back(std::move(row));
  }
  const std::size_t k = report.models.size();
  std::vector<std::vector<double>> columns(k);
  for (const auto& row : report.scores) {
    for (std::size_t m = 0; m < k; ++m) columns[m].push_back(row[m]);
  }
  for (const auto& c : columns) {
    report.mean.push_back(mean_of(c));
    report.sem.push_back(c.empty() ? 0.0 : sd_of(c) / std::sqrt(static_cast<double>(c.size())));
  }
  std::vector<std::size_t> rank(k);
  std::iota(rank.begin(), rank.end(), 0);
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) { return report.mean[a] < report.mean[b]; });
  if (k >= 2) {
    report.test = paired_t_test(columns[rank[0]], columns[rank[1]]);
    report.test.better = report.models[rank[0]];
    report.test.worse = report.models[rank[1]];
  } else {
    report.test.better = report.models[0];
  }
  Matrix evidence;
  for (const auto& row : report.scores) {
    std::vector<double> e;
    for (double s : row) e.push_back(-s / 2.0);
    evidence.push_back(std::move(e));
  }
  auto exp = exceedance_probability(evidence, k, options.mc_samples, options.seed);
  report.exceedance = std::move(exp.exceedance);
  report.alpha = std::move(exp.alpha);
  return report;
}

ComparisonReport compare(const std::map<std::string, std::vector<FitResult>>& fits, const CompareOptions& options) {
  return compare(std::vector<std::pair<std::string, std::vector<FitResult>>>(fits.begin(), fits.end()), options);
}

void to_json(nlohmann::json& j, const ComparisonReport& report) {
  auto finite = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  j = nlohmann::json{{"models", report.models},
                     {"participants", report.participants},
                     {"excluded", report.excluded},
                     {"metric", std::string(to_string(report.metric))},
                     {"scores", report.scores},
                     {"mean", report.mean},
                     {"sem", report.sem},
                     {"t_test",
                      {{"better", report.test.better},
                       {"worse", report.test.worse},
                       {"direction", "worse > better"},
                       {"mean_difference", finite(report.test.mean_difference)},
                       {"t", finite(report.test.t_stat)},
                       {"p", finite(report.test.p_value)},
                       {"df", report.test.df}}},
                     {"exceedance", report.exceedance},
                     {"alpha", report.alpha},
                     {"evidence", report.evidence}};
}

std::string scores_to_csv(const ComparisonReport& report) {
  std::string out = fmt::format("participant,model,{}\n", to_string(report.metric));
  for (std::size_t i = 0; i < report.participants.size(); ++i) {
    for (std::size_t m = 0; m < report.models.size(); ++m) {
      out += fmt::format("{},{},{}\n", report.participants[i], report.models[m], report.scores[i][m]);
    }
  }
  return out;
}

}  // namespace cogmod
