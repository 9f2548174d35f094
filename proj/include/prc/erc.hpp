#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prc/corpus.hpp"

namespace prc {

/// Six basic emotions plus Neutral. Serialized with capitalized names.
enum class EmotionLabel { Anger, Disgust, Fear, Joy, Sadness, Surprise, Neutral };

inline constexpr std::size_t kEmotionCount = 7;

std::string_view emotion_name(EmotionLabel e);
EmotionLabel parse_emotion(std::string_view name);  // throws on unknown name
bool is_negative_emotion(EmotionLabel e);           // Anger, Disgust, Fear, Sadness

/// Per-utterance emotion labeler. Implementations must return exactly one
/// label per utterance, in order.
class ErcAnnotator {
 public:
  virtual ~ErcAnnotator() = default;
  virtual std::vector<EmotionLabel> annotate(const Dialogue& dialogue) const = 0;
  virtual std::string name() const = 0;
  virtual std::string version() const = 0;
  std::string id() const { return name() + "@" + version(); }
};

/// Offline annotation store, persisted as one JSON file per
/// (annotator id, dialogue id). Writers are serialized; readers may run
/// concurrently with each other.
class AnnotationCache {
 public:
  explicit AnnotationCache(std::filesystem::path dir);

  std::optional<std::vector<EmotionLabel>> get(const std::string& annotator_id,
                                               const std::string& dialogue_id) const;
  void put(const std::string& annotator_id, const std::string& dialogue_id,
           const std::vector<EmotionLabel>& labels);

  std::size_t entry_count(const std::string& annotator_id) const;
  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path entry_path(const std::string& annotator_id,
                                   const std::string& dialogue_id) const;

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::vector<EmotionLabel>> memory_;
};

/// Annotates a whole dialogue, serving from / filling the cache when one is
/// given. Throws if the annotator violates the one-label-per-utterance
/// contract; no partial annotations are ever cached.
std::vector<EmotionLabel> annotate_dialogue(const ErcAnnotator& annotator,
                                            const Dialogue& dialogue,
                                            AnnotationCache* cache = nullptr);

/// Deterministic keyword annotator: each utterance gets the label of the
/// first lexicon word it contains (left-to-right, case-insensitive), Neutral
/// when none matches.
class LexiconAnnotator : public ErcAnnotator {
 public:
  explicit LexiconAnnotator(std::map<std::string, EmotionLabel> lexicon,
                            std::string name = "lexicon");

  static LexiconAnnotator with_default_lexicon();
  static LexiconAnnotator from_file(const std::filesystem::path& path);

  std::vector<EmotionLabel> annotate(const Dialogue& dialogue) const override;
  std::string name() const override { return name_; }
  std::string version() const override { return version_; }

  EmotionLabel label_text(const std::string& text) const;
  const std::map<std::string, EmotionLabel>& lexicon() const { return lexicon_; }

 private:
  std::map<std::string, EmotionLabel> lexicon_;  // lowercased words
  std::string name_;
  std::string version_;  // content hash, so edited lexicons never share cache entries
};

/// Serves pre-assigned labels by dialogue id; fails on unknown dialogues.
/// Used for corpora whose emotions are fixed out of band.
class FixedAnnotator : public ErcAnnotator {
 public:
  FixedAnnotator(std::map<std::string, std::vector<EmotionLabel>> labels,
                 std::string name, std::string version);

  /// Reads every stored entry for `annotator_id` from a cache directory.
  static FixedAnnotator from_cache_dir(const std::filesystem::path& dir,
                                       const std::string& annotator_id);

  std::vector<EmotionLabel> annotate(const Dialogue& dialogue) const override;
  std::string name() const override { return name_; }
  std::string version() const override { return version_; }

 private:
  std::map<std::string, std::vector<EmotionLabel>> labels_;
  std::string name_;
  std::string version_;
};

struct ErcTrainConfig {
  int epochs = 20;
  double learning_rate = 5e-3;
  std::uint64_t seed = 1;
  int hash_dim = 4096;
  int batch_size = 32;
  double validation_fraction = 0.1;
};

struct ErcLabeledDialogue {
  Dialogue dialogue;
  std::vector<EmotionLabel> emotions;  // gold, one per utterance
};

/// Labeled ERC corpus: dialogue JSONL records extended with an "emotion"
/// string per utterance. Unknown emotion names are an error.
std::vector<ErcLabeledDialogue> load_erc_corpus(const std::filesystem::path& path);

/// Utterance-level softmax classifier over hashed text features plus a
/// binary target-speaker indicator.
class TrainedErcAnnotator : public ErcAnnotator {
 public:
  std::vector<EmotionLabel> annotate(const Dialogue& dialogue) const override;
  std::string name() const override { return "trained-erc"; }
  std::string version() const override { return version_; }

  EmotionLabel classify(const std::string& text, bool is_target) const;

  void save(const std::filesystem::path& path) const;
  static std::unique_ptr<TrainedErcAnnotator> load(const std::filesystem::path& path);

 private:
  friend struct ErcTrainer;
  int hash_dim_ = 0;
  std::vector<double> weights_;  // kEmotionCount x (hash_dim + 2), row-major
  std::string version_;
};

struct ErcTrainResult {
  std::unique_ptr<TrainedErcAnnotator> annotator;
  double validation_accuracy = 0.0;
};

ErcTrainResult train_erc(const ErcTrainConfig& config,
                         std::span<const ErcLabeledDialogue> corpus);

}  // namespace prc
