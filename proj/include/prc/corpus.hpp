#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prc/traits.hpp"

namespace prc {

struct Utterance {
  int index = 0;              // 0-based position in the dialogue
  std::string speaker_id;
  std::string text;           // non-empty after trimming
  bool is_target = false;     // speaker is the analyzed speaker
};

struct Dialogue {
  std::string dialogue_id;
  std::vector<Utterance> utterances;
  std::string target_speaker;
  TraitVector labels;

  std::size_t target_utterance_count() const;
  std::vector<std::string> distinct_speakers() const;
};

/// Empty result means the dialogue is valid; otherwise (field, message).
std::optional<std::pair<std::string, std::string>> validate_dialogue(const Dialogue& d);

struct RecordDiagnostic {
  std::size_t line = 0;  // 1-based line in the source file
  std::string field;
  std::string message;

  std::string to_string() const;
};

struct LoadResult {
  std::vector<Dialogue> dialogues;
  std::vector<RecordDiagnostic> rejected;
};

/// Reads one-JSON-object-per-line dialogue records. Invalid records are
/// reported in `rejected` instead of aborting the load. Throws on a missing
/// or empty file.
LoadResult load_dataset(const std::filesystem::path& path);

void save_dataset(const std::filesystem::path& path, std::span<const Dialogue> dialogues);

struct DatasetSplit {
  std::vector<Dialogue> train;
  std::vector<Dialogue> validation;
  std::vector<Dialogue> test;
};

/// Deterministic unstratified 8:1:1 split. Requires at least 10 dialogues.
DatasetSplit split_dataset(std::span<const Dialogue> dialogues, std::uint64_t seed);

/// Persists the three splits next to a manifest recording the seed and sizes.
void save_split(const DatasetSplit& split, const std::filesystem::path& dir, std::uint64_t seed);
DatasetSplit load_split(const std::filesystem::path& dir);

/// First ceil(fraction * m) utterances, extended forward by whole utterances
/// until at least one target-speaker utterance is included. fraction 1.0
/// returns the dialogue unchanged. Partial prefixes carry the derived id
/// "<dialogue_id>#p<k>" so cached annotations stay per-input.
Dialogue flow_prefix(const Dialogue& dialogue, double fraction);

/// Target-utterance count of the raw ceil(fraction * m) prefix, before the
/// extension rule. May be zero.
std::size_t raw_prefix_target_count(const Dialogue& dialogue, double fraction);

struct StatsReport {
  std::size_t dialogue_count = 0;
  double mean_utterances_per_dialogue = 0.0;
  std::size_t unique_utterance_count = 0;
  double mean_utterance_length_words = 0.0;
  // positive fraction per trait; the negative fraction is its complement
  std::array<double, kTraitCount> positive_fraction{};

  std::string ratio_string(Trait t) const;  // ".43:.57", two decimals
  std::string to_json_string() const;
};

StatsReport compute_stats(std::span<const Dialogue> dialogues);

}  // namespace prc
