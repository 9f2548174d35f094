#include "prc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "prc/text.hpp"
#include <json.hpp>

namespace prc {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::size_t Dialogue::target_utterance_count() const {
  std::size_t n = 0;
  for (const auto& u : utterances) n += u.is_target ? 1 : 0;
  return n;
}

std::vector<std::string> Dialogue::distinct_speakers() const {
  std::vector<std::string> speakers;
  for (const auto& u : utterances) {
    if (std::find(speakers.begin(), speakers.end(), u.speaker_id) == speakers.end()) {
      speakers.push_back(u.speaker_id);
    }
  }
  return speakers;
}

std::optional<std::pair<std::string, std::string>> validate_dialogue(const Dialogue& d) {
  if (d.dialogue_id.empty()) return std::pair{"dialogue_id", "must be non-empty"};
  if (d.target_speaker.empty()) return std::pair{"target_speaker", "must be non-empty"};
  if (d.utterances.empty()) return std::pair{"utterances", "must be non-empty"};
  for (std::size_t i = 0; i < d.utterances.size(); ++i) {
    const auto& u = d.utterances[i];
    if (u.index != static_cast<int>(i)) {
      return std::pair{"utterances", "indices must be consecutive from 0"};
    }
    if (trim(u.text).empty()) {
      return std::pair{"utterances[" + std::to_string(i) + "].text", "empty after trimming"};
    }
    if (u.speaker_id.empty()) {
      return std::pair{"utterances[" + std::to_string(i) + "].speaker", "must be non-empty"};
    }
    if (u.is_target != (u.speaker_id == d.target_speaker)) {
      return std::pair{"utterances[" + std::to_string(i) + "].speaker",
                       "is_target flag inconsistent with target_speaker"};
    }
  }
  if (d.target_utterance_count() == 0) {
    return std::pair{"target_speaker", "no utterance from the target speaker"};
  }
  for (int v : d.labels.values) {
    if (v != 0 && v != 1) return std::pair{"labels", "trait values must be 0 or 1"};
  }
  return std::nullopt;
}

std::string RecordDiagnostic::to_string() const {
  return "line " + std::to_string(line) + ": field '" + field + "': " + message;
}

namespace {

struct FieldError {
  std::string field;
  std::string message;
};

Dialogue parse_record(const json& rec) {
  Dialogue d;
  if (!rec.is_object()) throw FieldError{"record", "not a JSON object"};
  auto require = [&](const char* key) -> const json& {
    auto it = rec.find(key);
    if (it == rec.end()) throw FieldError{key, "missing"};
    return *it;
  };
  const json& id = require("dialogue_id");
  if (!id.is_string()) throw FieldError{"dialogue_id", "must be a string"};
  d.dialogue_id = id.get<std::string>();

  const json& target = require("target_speaker");
  if (!target.is_string()) throw FieldError{"target_speaker", "must be a string"};
  d.target_speaker = target.get<std::string>();

  const json& utts = require("utterances");
  if (!utts.is_array()) throw FieldError{"utterances", "must be an array"};
  int index = 0;
  for (const json& u : utts) {
    std::string where = "utterances[" + std::to_string(index) + "]";
    if (!u.is_object() || !u.contains("speaker") || !u.contains("text") ||
        !u["speaker"].is_string() || !u["text"].is_string()) {
      throw FieldError{where, "needs string fields speaker and text"};
    }
    Utterance utt;
    utt.index = index++;
    utt.speaker_id = u["speaker"].get<std::string>();
    utt.text = u["text"].get<std::string>();
    utt.is_target = utt.speaker_id == d.target_speaker;
    d.utterances.push_back(std::move(utt));
  }

  const json& labels = require("labels");
  if (!labels.is_object()) throw FieldError{"labels", "must be an object"};
  for (Trait t : kAllTraits) {
    std::string code(trait_code(t));
    auto it = labels.find(code);
    if (it == labels.end()) throw FieldError{"labels." + code, "missing trait"};
    if (!it->is_number_integer() || (it->get<int>() != 0 && it->get<int>() != 1)) {
      throw FieldError{"labels." + code, "must be 0 or 1"};
    }
    d.labels[t] = it->get<int>();
  }
  return d;
}

}  // namespace

LoadResult load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());

  LoadResult result;
  std::string line;
  std::size_t line_no = 0;
  std::size_t record_count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++record_count;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) {
      result.rejected.push_back({line_no, "json", "malformed JSON record"});
      continue;
    }
    try {
      Dialogue d = parse_record(rec);
      if (auto err = validate_dialogue(d)) {
        result.rejected.push_back({line_no, err->first, err->second});
      } else {
        result.dialogues.push_back(std::move(d));
      }
    } catch (const FieldError& err) {
      result.rejected.push_back({line_no, err.field, err.message});
    }
  }
  if (record_count == 0) {
    throw std::runtime_error("empty dataset file: " + path.string());
  }
  return result;
}

void save_dataset(const std::filesystem::path& path, std::span<const Dialogue> dialogues) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path.string());
  for (const Dialogue& d : dialogues) {
    ordered_json rec;
    rec["dialogue_id"] = d.dialogue_id;
    rec["target_speaker"] = d.target_speaker;
    ordered_json utts = ordered_json::array();
    for (const Utterance& u : d.utterances) {
      utts.push_back({{"speaker", u.speaker_id}, {"text", u.text}});
    }
    rec["utterances"] = std::move(utts);
    ordered_json labels;
    for (Trait t : kAllTraits) labels[std::string(trait_code(t))] = d.labels[t];
    rec["labels"] = std::move(labels);
    out << rec.dump() << '\n';
  }
}

DatasetSplit split_dataset(std::span<const Dialogue> dialogues, std::uint64_t seed) {
  if (dialogues.size() < 10) {
    throw std::invalid_argument("split_dataset needs at least 10 dialogues, got " +
                                std::to_string(dialogues.size()));
  }
  std::vector<std::size_t> order(dialogues.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng_shuffle(order, rng);

  const std::size_t n = dialogues.size();
  const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n / 10.0)));

  DatasetSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    const Dialogue& d = dialogues[order[i]];
    if (i < k) {
      split.test.push_back(d);
    } else if (i < 2 * k) {
      split.validation.push_back(d);
    } else {
      split.train.push_back(d);
    }
  }
  return split;
}

void save_split(const DatasetSplit& split, const std::filesystem::path& dir, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  save_dataset(dir / "train.jsonl", split.train);
  save_dataset(dir / "validation.jsonl", split.validation);
  save_dataset(dir / "test.jsonl", split.test);
  ordered_json manifest;
  manifest["seed"] = seed;
  manifest["sizes"] = {{"train", split.train.size()},
                       {"validation", split.validation.size()},
                       {"test", split.test.size()}};
  manifest["files"] = {{"train", "train.jsonl"},
                       {"validation", "validation.jsonl"},
                       {"test", "test.jsonl"}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write split manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

DatasetSplit load_split(const std::filesystem::path& dir) {
  DatasetSplit split;
  split.train = load_dataset(dir / "train.jsonl").dialogues;
  split.validation = load_dataset(dir / "validation.jsonl").dialogues;
  split.test = load_dataset(dir / "test.jsonl").dialogues;
  return split;
}

namespace {

std::size_t prefix_length(const Dialogue& dialogue, double fraction) {
  const std::size_t m = dialogue.utterances.size();
  if (fraction >= 1.0) return m;
  auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(m)));
  k = std::clamp<std::size_t>(k, 1, m);
  return k;
}

}  // namespace

Dialogue flow_prefix(const Dialogue& dialogue, double fraction) {
  std::size_t k = prefix_length(dialogue, fraction);
  // Extend forward until a target utterance is included.
  while (k < dialogue.utterances.size()) {
    bool has_target = std::any_of(dialogue.utterances.begin(),
                                  dialogue.utterances.begin() + static_cast<long>(k),
                                  [](const Utterance& u) { return u.is_target; });
    if (has_target) break;
    ++k;
  }
  if (k == dialogue.utterances.size()) return dialogue;
  Dialogue prefix = dialogue;
  // Partial prefixes are distinct inputs; they must never share annotation
  // cache entries with the full dialogue.
  prefix.dialogue_id = dialogue.dialogue_id + "#p" + std::to_string(k);
  prefix.utterances.assign(dialogue.utterances.begin(),
                           dialogue.utterances.begin() + static_cast<long>(k));
  return prefix;
}

std::size_t raw_prefix_target_count(const Dialogue& dialogue, double fraction) {
  std::size_t k = prefix_length(dialogue, fraction);
  std::size_t count = 0;
  for (std::size_t i = 0; i < k; ++i) count += dialogue.utterances[i].is_target ? 1 : 0;
  return count;
}

std::string StatsReport::ratio_string(Trait t) const {
  double pos = positive_fraction[trait_index(t)];
  auto fmt = [](double v) {
    std::string s = format_fixed(v, 2);
    if (s.size() > 1 && s[0] == '0') s.erase(0, 1);  // ".43" like the usual table style
    return s;
  };
  return fmt(pos) + ":" + fmt(1.0 - pos);
}

std::string StatsReport::to_json_string() const {
  ordered_json j;
  j["dialogue_count"] = dialogue_count;
  j["mean_utterances_per_dialogue"] = mean_utterances_per_dialogue;
  j["unique_utterance_count"] = unique_utterance_count;
  j["mean_utterance_length_words"] = mean_utterance_length_words;
  ordered_json ratios;
  for (Trait t : kAllTraits) {
    ratios[std::string(trait_code(t))] = {
        {"positive_fraction", positive_fraction[trait_index(t)]},
        {"ratio", ratio_string(t)}};
  }
  j["label_distribution"] = std::move(ratios);
  return j.dump(2);
}

StatsReport compute_stats(std::span<const Dialogue> dialogues) {
  if (dialogues.empty()) throw std::invalid_argument("compute_stats: empty dialogue list");

  StatsReport report;
  report.dialogue_count = dialogues.size();

  std::size_t total_utterances = 0;
  std::size_t total_words = 0;
  std::set<std::string> unique_texts;
  std::array<std::size_t, kTraitCount> positives{};
  for (const Dialogue& d : dialogues) {
    total_utterances += d.utterances.size();
    for (const Utterance& u : d.utterances) {
      total_words += count_words(u.text);
      unique_texts.insert(u.text);
    }
    for (Trait t : kAllTraits) positives[trait_index(t)] += static_cast<std::size_t>(d.labels[t]);
  }
  report.mean_utterances_per_dialogue =
      static_cast<double>(total_utterances) / static_cast<double>(dialogues.size());
  report.unique_utterance_count = unique_texts.size();
  report.mean_utterance_length_words =
      total_utterances == 0 ? 0.0
                            : static_cast<double>(total_words) / static_cast<double>(total_utterances);
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    report.positive_fraction[i] =
        static_cast<double>(positives[i]) / static_cast<double>(dialogues.size());
  }
  return report;
}

}  // namespace prc
