#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "prc/corpus.hpp"
#include "prc/text.hpp"

namespace prc::testutil {

/// Self-deleting scratch directory.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("prc-test-" + tag + "-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline Dialogue make_dialogue(std::string id,
                              const std::vector<std::pair<std::string, std::string>>& turns,
                              std::string target, TraitVector labels = {}) {
  Dialogue d;
  d.dialogue_id = std::move(id);
  d.target_speaker = std::move(target);
  int index = 0;
  for (const auto& [speaker, text] : turns) {
    Utterance u;
    u.index = index++;
    u.speaker_id = speaker;
    u.text = text;
    u.is_target = speaker == d.target_speaker;
    d.utterances.push_back(std::move(u));
  }
  d.labels = labels;
  return d;
}

/// Random two-speaker dialogue with at least one target utterance.
inline Dialogue random_dialogue(Rng& rng, std::string id) {
  std::size_t m = 2 + rng_index(rng, 14);
  std::vector<std::pair<std::string, std::string>> turns;
  bool has_target = false;
  for (std::size_t i = 0; i < m; ++i) {
    bool target = rng_uniform(rng) < 0.4;
    if (i + 1 == m && !has_target) target = true;
    has_target = has_target || target;
    std::string text = "utterance " + std::to_string(i) + " word" +
                       std::to_string(rng_index(rng, 50));
    turns.emplace_back(target ? "Sam" : "Riley", std::move(text));
  }
  TraitVector labels;
  for (Trait t : kAllTraits) labels[t] = rng_uniform(rng) < 0.5 ? 1 : 0;
  return make_dialogue(std::move(id), turns, "Sam", labels);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace prc::testutil
