#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prc/corpus.hpp"
#include "prc/erc.hpp"

namespace prc {

/// Corpus whose NEU label is a pure function of the target speaker's
/// emotion sequence (at least two negative emotions), while the utterance
/// text is label-uninformative filler. Emotions are assigned out of band
/// and served by a FixedAnnotator, so a raw-text premise carries no signal.
struct SyntheticConfig {
  std::size_t dialogue_count = 500;
  std::uint64_t seed = 1;
  int min_utterances = 6;
  int max_utterances = 12;
  double negative_emotion_prob = 0.35;  // keeps the NEU labels near balance
};

struct SyntheticCorpus {
  std::vector<Dialogue> dialogues;
  std::map<std::string, std::vector<EmotionLabel>> emotions;  // by dialogue_id

  static constexpr const char* kAnnotatorName = "oracle";
  static constexpr const char* kAnnotatorVersion = "1";

  FixedAnnotator annotator() const;
  void fill_cache(AnnotationCache& cache) const;
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& config);

}  // namespace prc
