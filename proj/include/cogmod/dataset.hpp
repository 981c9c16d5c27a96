#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

namespace cogmod {

enum class Paradigm { DecisionMaking, Learning, Planning, WorkingMemory };

enum class Feedback { Partial, Full };

/// Paradigm plus, for the learning task, whether forgone rewards are observed.
struct ParadigmKind {
  Paradigm paradigm = Paradigm::Learning;
  Feedback feedback = Feedback::Partial;

  static constexpr ParadigmKind decision() { return {Paradigm::DecisionMaking, Feedback::Partial}; }
  static constexpr ParadigmKind learning(Feedback f) { return {Paradigm::Learning, f}; }
  static constexpr ParadigmKind planning() { return {Paradigm::Planning, Feedback::Partial}; }
  static constexpr ParadigmKind working_memory() { return {Paradigm::WorkingMemory, Feedback::Partial}; }

  friend bool operator==(const ParadigmKind& a, const ParadigmKind& b) {
    if (a.paradigm != b.paradigm) return false;
    return a.paradigm != Paradigm::Learning || a.feedback == b.feedback;
  }
};

/// "decision", "learning-partial", "learning-full", "planning", "wm".
std::string to_string(ParadigmKind kind);
ParadigmKind parse_paradigm_kind(std::string_view text);

/// Number of choice points per trial (2 for the two-stage task).
int decision_stages(Paradigm paradigm) noexcept;
/// Number of response options at a choice point.
int option_count(Paradigm paradigm) noexcept;

struct DecisionTrial {
  std::vector<int> features_a;
  std::vector<int> features_b;
  std::vector<double> validities;
  int choice = -1;  // 0 = A, 1 = B

  friend bool operator==(const DecisionTrial&, const DecisionTrial&) = default;
};

struct LearningTrial {
  int block = 0;
  int action = -1;
  int reward = 0;
  std::optional<int> forgone_reward;

  friend bool operator==(const LearningTrial&, const LearningTrial&) = default;
};

struct PlanningTrial {
  int action_1 = -1;
  int state_2 = -1;
  int action_2 = -1;
  int reward = 0;

  friend bool operator==(const PlanningTrial&, const PlanningTrial&) = default;
};

struct MemoryTrial {
  int block = 0;
  int set_size = 3;
  int stimulus = 0;
  int action = -1;
  int reward = 0;

  friend bool operator==(const MemoryTrial&, const MemoryTrial&) = default;
};

using TrialRecord = std::variant<DecisionTrial, LearningTrial, PlanningTrial, MemoryTrial>;

Paradigm paradigm_of(const TrialRecord& trial) noexcept;

/// Block index for paradigms with blocks, 0 otherwise.
int block_of(const TrialRecord& trial) noexcept;

/// Observed (or sampled) response at a choice point; -1 when not yet set.
int choice_at(const TrialRecord& trial, int stage);
void set_choice(TrialRecord& trial, int stage, int value);

struct ParticipantData {
  std::string participant_id;
  std::vector<TrialRecord> trials;

  friend bool operator==(const ParticipantData&, const ParticipantData&) = default;
};

/// Paradigm kind implied by a participant's trials (forgone rewards => full feedback).
ParadigmKind infer_kind(const ParticipantData& participant);

/// Rewards are stored as recorded; the dataset remembers which alphabet it uses.
enum class RewardAlphabet { ZeroOne, MinusOnePlusOne };

struct Dataset {
  ParadigmKind kind;
  std::vector<ParticipantData> participants;
  std::string provenance;
  RewardAlphabet reward_alphabet = RewardAlphabet::ZeroOne;

  std::size_t trial_count() const noexcept;
  const ParticipantData* find(std::string_view participant_id) const noexcept;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Throws SchemaMismatch/DomainError/EmptyDataset when the dataset breaks an invariant.
void validate(const Dataset& dataset);

enum class DataFormat { Csv, Json };

DataFormat format_from_path(const std::filesystem::path& path);

/// CSV decision-making files keep validities in a sidecar `<stem>.validities.json`.
std::filesystem::path validities_sidecar(const std::filesystem::path& csv_path);

Dataset load_dataset(const std::filesystem::path& path, ParadigmKind kind, DataFormat format);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path, DataFormat format);

/// In-memory variants used by load/save and by tests.
Dataset parse_csv(std::string_view text, ParadigmKind kind, const std::vector<double>& validities = {},
                  std::string provenance = {});
std::string to_csv(const Dataset& dataset);
Dataset parse_json(std::string_view text, ParadigmKind kind, std::string provenance = {});
std::string to_json(const Dataset& dataset);

struct SplitSpec {
  double prompt_fraction = 0.2;
  double validation_fraction = 0.4;
  double test_fraction = 0.4;
  std::uint64_t seed = 0;
};

struct DatasetSplit {
  Dataset prompt;
  Dataset validation;
  Dataset test;
};

/// Partitions participants (never trials) by a seeded shuffle followed by
/// contiguous slicing.
DatasetSplit split(const Dataset& dataset, const SplitSpec& spec);

/// Renders participants in the prompt text format. Participants are numbered
/// by position ("Data from participant k:"), so ids never leak into prompts.
std::string to_prompt_text(const Dataset& dataset, std::size_t max_participants, std::size_t max_trials);

/// Trial lines of one participant, without the header.
std::vector<std::string> prompt_lines(const ParticipantData& participant, ParadigmKind kind,
                                      std::size_t max_trials);

}  // namespace cogmod
