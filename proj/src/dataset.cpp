#include "cogmod/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cogmod/error.hpp"
#include "cogmod/random.hpp"

namespace cogmod {

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& message) { throw Error(ErrorKind::SchemaMismatch, message); }
[[noreturn]] void domain(const std::string& message) { throw Error(ErrorKind::DomainError, message); }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

int parse_int(std::string_view text, std::string_view column, std::size_t line_number) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    domain(fmt::format("line {}: column '{}' is not an integer: '{}'", line_number, column, text));
  }
  return value;
}

std::vector<std::string> expected_columns(ParadigmKind kind, std::size_t n_features) {
  switch (kind.paradigm) {
    case Paradigm::DecisionMaking: {
      std::vector<std::string> cols{"participant", "trial"};
      for (std::size_t j = 1; j <= n_features; ++j) cols.push_back(fmt::format("fa{}", j));
      for (std::size_t j = 1; j <= n_features; ++j) cols.push_back(fmt::format("fb{}", j));
      cols.emplace_back("choice");
      return cols;
    }
    case Paradigm::Learning:
      if (kind.feedback == Feedback::Full) return {"participant", "block", "trial", "action", "reward", "forgone"};
      return {"participant", "block", "trial", "action", "reward"};
    case Paradigm::Planning:
      return {"participant", "trial", "action1", "state2", "action2", "reward"};
    case Paradigm::WorkingMemory:
      return {"participant", "block", "set_size", "trial", "stimulus", "action", "reward"};
  }
  return {};
}

void check_range(int value, int lo, int hi, std::string_view field) {
  if (value < lo || value > hi) domain(fmt::format("{}={} outside [{}, {}]", field, value, lo, hi));
}

void validate_trial(const TrialRecord& trial, ParadigmKind kind, RewardAlphabet alphabet) {
  if (paradigm_of(trial) != kind.paradigm) schema("trial paradigm differs from dataset kind");
  auto check_reward = [&](int r, std::string_view field) {
    if (alphabet == RewardAlphabet::ZeroOne) {
      check_range(r, 0, 1, field);
    } else if (r != -1 && r != 1) {
      domain(fmt::format("{}={} outside {{-1, 1}}", field, r));
    }
  };
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DecisionTrial>) {
          if (t.features_a.empty() || t.features_a.size() != t.features_b.size()) {
            schema("feature vectors must be non-empty and of equal length");
          }
          if (t.validities.size() != t.features_a.size()) schema("validities length differs from feature count");
          for (int x : t.features_a) check_range(x, 0, 100, "feature");
          for (int x : t.features_b) check_range(x, 0, 100, "feature");
          for (std::size_t j = 0; j < t.validities.size(); ++j) {
            double v = t.validities[j];
            if (!(v >= 0.0 && v <= 1.0)) domain(fmt::format("validity {} outside [0, 1]", v));
            if (j > 0 && v > t.validities[j - 1]) domain("validities must be sorted descending");
          }
          check_range(t.choice, 0, 1, "choice");
        } else if constexpr (std::is_same_v<T, LearningTrial>) {
          if (t.block < 0) domain("negative block index");
          check_range(t.action, 0, 1, "action");
          check_reward(t.reward, "reward");
          if (kind.feedback == Feedback::Full) {
            if (!t.forgone_reward) schema("full-feedback trial lacks a forgone reward");
            check_reward(*t.forgone_reward, "forgone");
          } else if (t.forgone_reward) {
            schema("partial-feedback trial carries a forgone reward");
          }
        } else if constexpr (std::is_same_v<T, PlanningTrial>) {
          check_range(t.action_1, 0, 1, "action1");
          check_range(t.state_2, 0, 1, "state2");
          check_range(t.action_2, 0, 1, "action2");
          check_range(t.reward, 0, 1, "reward");
        } else {
          if (t.block < 0) domain("negative block index");
          check_range(t.set_size, 1, 6, "set_size");
          check_range(t.stimulus, 0, t.set_size - 1, "stimulus");
          check_range(t.action, 0, 2, "action");
          check_range(t.reward, 0, 1, "reward");
        }
      },
      trial);
}

RewardAlphabet infer_alphabet(const std::vector<ParticipantData>& participants) {
  for (const auto& p : participants) {
    for (const auto& t : p.trials) {
      if (const auto* l = std::get_if<LearningTrial>(&t)) {
        if (l->reward == -1 || (l->forgone_reward && *l->forgone_reward == -1)) {
          return RewardAlphabet::MinusOnePlusOne;
        }
      }
    }
  }
  return RewardAlphabet::ZeroOne;
}

ParticipantData& participant_slot(std::vector<ParticipantData>& participants, std::map<std::string, std::size_t>& index,
                                  std::string_view id) {
  auto it = index.find(std::string(id));
  if (it != index.end()) return participants[it->second];
  index.emplace(std::string(id), participants.size());
  participants.push_back(ParticipantData{std::string(id), {}});
  return participants.back();
}

std::string join_ints(const std::vector<int>& values, char separator) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += separator;
    out += std::to_string(values[i]);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << content;
}

const std::vector<double>& dataset_validities(const Dataset& dataset) {
  static const std::vector<double> empty;
  for (const auto& p : dataset.participants) {
    for (const auto& t : p.trials) {
      if (const auto* d = std::get_if<DecisionTrial>(&t)) return d->validities;
      return empty;
    }
  }
  return empty;
}

}  // namespace

std::string to_string(ParadigmKind kind) {
  switch (kind.paradigm) {
    case Paradigm::DecisionMaking: return "decision";
    case Paradigm::Learning: return kind.feedback == Feedback::Full ? "learning-full" : "learning-partial";
    case Paradigm::Planning: return "planning";
    case Paradigm::WorkingMemory: return "wm";
  }
  return "unknown";
}

ParadigmKind parse_paradigm_kind(std::string_view text) {
  if (text == "decision") return ParadigmKind::decision();
  if (text == "learning-partial" || text == "learning") return ParadigmKind::learning(Feedback::Partial);
  if (text == "learning-full") return ParadigmKind::learning(Feedback::Full);
  if (text == "planning") return ParadigmKind::planning();
  if (text == "wm" || text == "working-memory") return ParadigmKind::working_memory();
  throw Error(ErrorKind::ConfigError, fmt::format("unknown paradigm kind '{}'", text));
}

int decision_stages(Paradigm paradigm) noexcept { return paradigm == Paradigm::Planning ? 2 : 1; }

int option_count(Paradigm paradigm) noexcept { return paradigm == Paradigm::WorkingMemory ? 3 : 2; }

Paradigm paradigm_of(const TrialRecord& trial) noexcept {
  switch (trial.index()) {
    case 0: return Paradigm::DecisionMaking;
    case 1: return Paradigm::Learning;
    case 2: return Paradigm::Planning;
    default: return Paradigm::WorkingMemory;
  }
}

int block_of(const TrialRecord& trial) noexcept {
  if (const auto* l = std::get_if<LearningTrial>(&trial)) return l->block;
  if (const auto* m = std::get_if<MemoryTrial>(&trial)) return m->block;
  return 0;
}

int choice_at(const TrialRecord& trial, int stage) {
  return std::visit(
      [stage](const auto& t) -> int {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DecisionTrial>) {
          return t.choice;
        } else if constexpr (std::is_same_v<T, PlanningTrial>) {
          return stage == 0 ? t.action_1 : t.action_2;
        } else {
          return t.action;
        }
      },
      trial);
}

void set_choice(TrialRecord& trial, int stage, int value) {
  std::visit(
      [stage, value](auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DecisionTrial>) {
          t.choice = value;
        } else if constexpr (std::is_same_v<T, PlanningTrial>) {
          (stage == 0 ? t.action_1 : t.action_2) = value;
        } else {
          t.action = value;
        }
      },
      trial);
}

ParadigmKind infer_kind(const ParticipantData& participant) {
  if (participant.trials.empty()) throw Error(ErrorKind::EmptyDataset, "participant has no trials");
  const auto& first = participant.trials.front();
  const Paradigm p = paradigm_of(first);
  switch (p) {
    case Paradigm::DecisionMaking: return ParadigmKind::decision();
    case Paradigm::Planning: return ParadigmKind::planning();
    case Paradigm::WorkingMemory: return ParadigmKind::working_memory();
    case Paradigm::Learning: break;
  }
  const bool full = std::get<LearningTrial>(first).forgone_reward.has_value();
  return ParadigmKind::learning(full ? Feedback::Full : Feedback::Partial);
}

std::size_t Dataset::trial_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : participants) n += p.trials.size();
  return n;
}

const ParticipantData* Dataset::find(std::string_view participant_id) const noexcept {
  for (const auto& p : participants) {
    if (p.participant_id == participant_id) return &p;
  }
  return nullptr;
}

void validate(const Dataset& dataset) {
  if (dataset.participants.empty()) throw Error(ErrorKind::EmptyDataset, "dataset has no participants");
  std::set<std::string> ids;
  for (const auto& p : dataset.participants) {
    if (p.trials.empty()) throw Error(ErrorKind::EmptyDataset, "participant " + p.participant_id + " has no trials");
    if (!ids.insert(p.participant_id).second) schema("duplicate participant id " + p.participant_id);
    for (const auto& t : p.trials) validate_trial(t, dataset.kind, dataset.reward_alphabet);
  }
}

DataFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".json") return DataFormat::Json;
  if (ext == ".csv") return DataFormat::Csv;
  throw Error(ErrorKind::ConfigError, "cannot infer data format from " + path.string());
}

std::filesystem::path validities_sidecar(const std::filesystem::path& csv_path) {
  auto sidecar = csv_path;
  sidecar.replace_extension(".validities.json");
  return sidecar;
}

Dataset parse_csv(std::string_view text, ParadigmKind kind, const std::vector<double>& validities,
                  std::string provenance) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t nl = text.find('\n', start);
      std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorKind::EmptyDataset, "file is empty");

  auto header = split_fields(lines.front());
  std::size_t n_features = 0;
  if (kind.paradigm == Paradigm::DecisionMaking) {
    if (header.size() < 5 || (header.size() - 3) % 2 != 0) schema("decision header has wrong column count");
    n_features = (header.size() - 3) / 2;
  }
  auto expected = expected_columns(kind, n_features);
  if (header.size() != expected.size()) {
    schema(fmt::format("expected {} columns ({}), found {}", expected.size(), fmt::join(expected, ","),
                       header.size()));
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (header[i] != expected[i]) schema(fmt::format("column {} should be '{}', found '{}'", i + 1, expected[i], header[i]));
  }
  if (kind.paradigm == Paradigm::DecisionMaking && validities.size() != n_features) {
    schema(fmt::format("decision data needs {} validities, got {}", n_features, validities.size()));
  }

  Dataset dataset;
  dataset.kind = kind;
  dataset.provenance = std::move(provenance);
  std::map<std::string, std::size_t> index;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    auto fields = split_fields(lines[li]);
    if (fields.size() != expected.size()) {
      schema(fmt::format("line {}: expected {} fields, found {}", li + 1, expected.size(), fields.size()));
    }
    if (fields[0].empty()) schema(fmt::format("line {}: empty participant id", li + 1));
    auto col = [&](std::size_t i) { return parse_int(fields[i], expected[i], li + 1); };
    TrialRecord trial;
    switch (kind.paradigm) {
      case Paradigm::DecisionMaking: {
        DecisionTrial t;
        for (std::size_t j = 0; j < n_features; ++j) t.features_a.push_back(col(2 + j));
        for (std::size_t j = 0; j < n_features; ++j) t.features_b.push_back(col(2 + n_features + j));
        t.choice = col(2 + 2 * n_features);
        t.validities = validities;
        trial = std::move(t);
        break;
      }
      case Paradigm::Learning: {
        LearningTrial t;
        t.block = col(1);
        t.action = col(3);
        t.reward = col(4);
        if (kind.feedback == Feedback::Full) t.forgone_reward = col(5);
        trial = t;
        break;
      }
      case Paradigm::Planning:
        trial = PlanningTrial{col(2), col(3), col(4), col(5)};
        break;
      case Paradigm::WorkingMemory:
        trial = MemoryTrial{col(1), col(2), col(4), col(5), col(6)};
        break;
    }
    participant_slot(dataset.participants, index, fields[0]).trials.push_back(std::move(trial));
  }
  if (dataset.participants.empty()) throw Error(ErrorKind::EmptyDataset, "file has a header but no rows");
  dataset.reward_alphabet = infer_alphabet(dataset.participants);
  validate(dataset);
  return dataset;
}

std::string to_csv(const Dataset& dataset) {
  std::size_t n_features = 0;
  const auto& validities = dataset_validities(dataset);
  if (dataset.kind.paradigm == Paradigm::DecisionMaking) n_features = validities.size();
  std::string out = fmt::format("{}\n", fmt::join(expected_columns(dataset.kind, n_features), ","));
  for (const auto& p : dataset.participants) {
    for (std::size_t i = 0; i < p.trials.size(); ++i) {
      const auto& trial = p.trials[i];
      std::visit(
          [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, DecisionTrial>) {
              if (t.validities != validities) schema("CSV requires identical validities on every decision trial");
              out += fmt::format("{},{},{},{},{}\n", p.participant_id, i, join_ints(t.features_a, ','),
                                 join_ints(t.features_b, ','), t.choice);
            } else if constexpr (std::is_same_v<T, LearningTrial>) {
              out += fmt::format("{},{},{},{},{}", p.participant_id, t.block, i, t.action, t.reward);
              if (dataset.kind.feedback == Feedback::Full) out += fmt::format(",{}", t.forgone_reward.value_or(0));
              out += '\n';
            } else if constexpr (std::is_same_v<T, PlanningTrial>) {
              out += fmt::format("{},{},{},{},{},{}\n", p.participant_id, i, t.action_1, t.state_2, t.action_2,
                                 t.reward);
            } else {
              out += fmt::format("{},{},{},{},{},{},{}\n", p.participant_id, t.block, t.set_size, i, t.stimulus,
                                 t.action, t.reward);
            }
          },
          trial);
    }
  }
  return out;
}

Dataset parse_json(std::string_view text, ParadigmKind kind, std::string provenance) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("participants") || !doc["participants"].is_array()) {
    schema("JSON dataset needs a 'participants' array");
  }
  if (doc.contains("kind") && parse_paradigm_kind(doc["kind"].get<std::string>()) != kind) {
    schema("JSON kind '" + doc["kind"].get<std::string>() + "' differs from requested " + to_string(kind));
  }
  Dataset dataset;
  dataset.kind = kind;
  dataset.provenance = doc.value("provenance", provenance);
  std::vector<double> validities;
  if (kind.paradigm == Paradigm::DecisionMaking) {
    if (!doc.contains("validities")) schema("decision JSON needs 'validities'");
    validities = doc["validities"].get<std::vector<double>>();
  }

  std::vector<std::string> fields;
  switch (kind.paradigm) {
    case Paradigm::DecisionMaking: fields = {"trial", "fa", "fb", "choice"}; break;
    case Paradigm::Learning:
      fields = {"block", "trial", "action", "reward"};
      if (kind.feedback == Feedback::Full) fields.emplace_back("forgone");
      break;
    case Paradigm::Planning: fields = {"trial", "action1", "state2", "action2", "reward"}; break;
    case Paradigm::WorkingMemory: fields = {"block", "set_size", "trial", "stimulus", "action", "reward"}; break;
  }

  for (const auto& jp : doc["participants"]) {
    if (!jp.contains("id") || !jp.contains("trials")) schema("participant entries need 'id' and 'trials'");
    ParticipantData p{jp["id"].get<std::string>(), {}};
    for (const auto& jt : jp["trials"]) {
      if (!jt.is_object() || jt.size() != fields.size()) {
        schema(fmt::format("trial objects must have exactly the fields {}", fmt::join(fields, ",")));
      }
      for (const auto& f : fields) {
        if (!jt.contains(f)) schema("trial lacks field '" + f + "'");
      }
      auto integer = [&](const char* f) {
        if (!jt[f].is_number_integer()) domain(std::string("field '") + f + "' is not an integer");
        return jt[f].get<int>();
      };
      switch (kind.paradigm) {
        case Paradigm::DecisionMaking:
          p.trials.emplace_back(DecisionTrial{jt["fa"].get<std::vector<int>>(), jt["fb"].get<std::vector<int>>(),
                                              validities, integer("choice")});
          break;
        case Paradigm::Learning: {
          LearningTrial t{integer("block"), integer("action"), integer("reward"), std::nullopt};
          if (kind.feedback == Feedback::Full) t.forgone_reward = integer("forgone");
          p.trials.emplace_back(t);
          break;
        }
        case Paradigm::Planning:
          p.trials.emplace_back(
              PlanningTrial{integer("action1"), integer("state2"), integer("action2"), integer("reward")});
          break;
        case Paradigm::WorkingMemory:
          p.trials.emplace_back(MemoryTrial{integer("block"), integer("set_size"), integer("stimulus"),
                                            integer("action"), integer("reward")});
          break;
      }
    }
    dataset.participants.push_back(std::move(p));
  }
  dataset.reward_alphabet = infer_alphabet(dataset.participants);
  validate(dataset);
  return dataset;
}

std::string to_json(const Dataset& dataset) {
  json doc;
  doc["kind"] = to_string(dataset.kind);
  doc["provenance"] = dataset.provenance;
  if (dataset.kind.paradigm == Paradigm::DecisionMaking) doc["validities"] = dataset_validities(dataset);
  json participants = json::array();
  for (const auto& p : dataset.participants) {
    json trials = json::array();
    for (std::size_t i = 0; i < p.trials.size(); ++i) {
      json jt;
      std::visit(
          [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, DecisionTrial>) {
              jt = {{"trial", i}, {"fa", t.features_a}, {"fb", t.features_b}, {"choice", t.choice}};
            } else if constexpr (std::is_same_v<T, LearningTrial>) {
              jt = {{"block", t.block}, {"trial", i}, {"action", t.action}, {"reward", t.reward}};
              if (t.forgone_reward) jt["forgone"] = *t.forgone_reward;
            } else if constexpr (std::is_same_v<T, PlanningTrial>) {
              jt = {{"trial", i}, {"action1", t.action_1}, {"state2", t.state_2}, {"action2", t.action_2},
                    {"reward", t.reward}};
            } else {
              jt = {{"block", t.block}, {"set_size", t.set_size}, {"trial", i},
                    {"stimulus", t.stimulus}, {"action", t.action}, {"reward", t.reward}};
            }
          },
          p.trials[i]);
      trials.push_back(std::move(jt));
    }
    participants.push_back({{"id", p.participant_id}, {"trials", std::move(trials)}});
  }
  doc["participants"] = std::move(participants);
  return doc.dump(1) + "\n";
}

Dataset load_dataset(const std::filesystem::path& path, ParadigmKind kind, DataFormat format) {
  std::string text = read_file(path);
  if (format == DataFormat::Json) return parse_json(text, kind, path.string());
  std::vector<double> validities;
  if (kind.paradigm == Paradigm::DecisionMaking) {
    auto sidecar = validities_sidecar(path);
    if (!std::filesystem::exists(sidecar)) schema("missing validities sidecar " + sidecar.string());
    try {
      validities = json::parse(read_file(sidecar)).get<std::vector<double>>();
    } catch (const json::exception& e) {
      schema(std::string("malformed validities sidecar: ") + e.what());
    }
  }
  return parse_csv(text, kind, validities, path.string());
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path, DataFormat format) {
  if (format == DataFormat::Json) {
    write_file(path, to_json(dataset));
    return;
  }
  write_file(path, to_csv(dataset));
  if (dataset.kind.paradigm == Paradigm::DecisionMaking) {
    write_file(validities_sidecar(path), json(dataset_validities(dataset)).dump() + "\n");
  }
}

DatasetSplit split(const Dataset& dataset, const SplitSpec& spec) {
  const double fractions[] = {spec.prompt_fraction, spec.validation_fraction, spec.test_fraction};
  for (double f : fractions) {
    if (!(f > 0.0 && f < 1.0)) throw Error(ErrorKind::ConfigError, "split fractions must lie in (0, 1)");
  }
  if (std::abs(spec.prompt_fraction + spec.validation_fraction + spec.test_fraction - 1.0) > 1e-9) {
    throw Error(ErrorKind::ConfigError, "split fractions must sum to 1");
  }
  const std::size_t n = dataset.participants.size();
  const auto n_prompt = static_cast<std::size_t>(std::llround(spec.prompt_fraction * static_cast<double>(n)));
  const auto n_validation = static_cast<std::size_t>(std::llround(spec.validation_fraction * static_cast<double>(n)));
  if (n_prompt == 0 || n_validation == 0 || n_prompt + n_validation >= n) {
    throw Error(ErrorKind::TooFewParticipants,
                fmt::format("{} participants cannot fill three non-empty splits", n));
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(spec.seed, "split"));
  rng.shuffle(order);

  DatasetSplit out;
  for (Dataset* part : {&out.prompt, &out.validation, &out.test}) {
    part->kind = dataset.kind;
    part->reward_alphabet = dataset.reward_alphabet;
  }
  out.prompt.provenance = dataset.provenance + "#prompt";
  out.validation.provenance = dataset.provenance + "#validation";
  out.test.provenance = dataset.provenance + "#test";
  for (std::size_t i = 0; i < n; ++i) {
    Dataset& target = i < n_prompt ? out.prompt : (i < n_prompt + n_validation ? out.validation : out.test);
    target.participants.push_back(dataset.participants[order[i]]);
  }
  return out;
}

std::vector<std::string> prompt_lines(const ParticipantData& participant, ParadigmKind kind, std::size_t max_trials) {
  static constexpr const char* kMountains[] = {"Pink", "Blue"};
  static constexpr const char* kGenies[2][2] = {{"W", "X"}, {"S", "T"}};
  std::vector<std::string> lines;
  int previous_block = -1;
  int trial_in_block = 0;
  const std::size_t n = std::min(max_trials, participant.trials.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& trial = participant.trials[i];
    int block = block_of(trial);
    if (block != previous_block) {
      previous_block = block;
      trial_in_block = 0;
    }
    std::visit(
        [&](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, DecisionTrial>) {
            lines.push_back(fmt::format("Trial {}: Product A ratings: [{}]. Product B ratings: [{}]. Chosen option: {}",
                                        i + 1, join_ints(t.features_a, ' '), join_ints(t.features_b, ' '),
                                        t.choice == 0 ? "A" : "B"));
          } else if constexpr (std::is_same_v<T, LearningTrial>) {
            std::string line = fmt::format("Block: {}, Trial: {}, Chosen action: {}, Reward for the chosen action: {}",
                                           t.block, trial_in_block + 1, t.action, t.reward);
            if (kind.feedback == Feedback::Full && t.forgone_reward) {
              line += fmt::format(", Reward for the unchosen action: {}", *t.forgone_reward);
            }
            lines.push_back(std::move(line));
          } else if constexpr (std::is_same_v<T, PlanningTrial>) {
            lines.push_back(fmt::format(
                "Trial {}: The participant chose magic carpet {} and ended up on the {} Mountain. "
                "The participant rubbed the lamp {} and received {} {}.",
                i, t.action_1 == 0 ? "A" : "B", kMountains[t.state_2], kGenies[t.state_2][t.action_2], t.reward,
                t.reward == 1 ? "coin" : "coins"));
          } else {
            lines.push_back(fmt::format("Block: {}, Set size:{}, Trial: {}, State: {}, Chosen action: {}, Reward: {}",
                                        t.block, t.set_size, trial_in_block, t.stimulus, t.action, t.reward));
          }
        },
        trial);
    ++trial_in_block;
  }
  return lines;
}

std::string to_prompt_text(const Dataset& dataset, std::size_t max_participants, std::size_t max_trials) {
  std::string out;
  const std::size_t n = std::min(max_participants, dataset.participants.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (k) out += "\n";
    out += fmt::format("Data from participant {}:\n", k + 1);
    for (const auto& line : prompt_lines(dataset.participants[k], dataset.kind, max_trials)) {
      out += line;
      out += '\n';
    }
  }
  return out;
}

}  // namespace cogmod
