#include <doctest.h>

#include "prc/erc.hpp"
#include "prc/synthetic.hpp"
#include "test_util.hpp"

using namespace prc;
using namespace prc::testutil;

namespace {

/// Counts how often annotate() actually runs, to observe cache behavior.
class CountingAnnotator : public ErcAnnotator {
 public:
  explicit CountingAnnotator(std::string version) : version_(std::move(version)) {}

  std::vector<EmotionLabel> annotate(const Dialogue& dialogue) const override {
    ++calls;
    return std::vector<EmotionLabel>(dialogue.utterances.size(), EmotionLabel::Joy);
  }
  std::string name() const override { return "counting"; }
  std::string version() const override { return version_; }

  mutable int calls = 0;

 private:
  std::string version_;
};

class FailingAnnotator : public ErcAnnotator {
 public:
  std::vector<EmotionLabel> annotate(const Dialogue&) const override {
    throw std::runtime_error("annotator failure");
  }
  std::string name() const override { return "failing"; }
  std::string version() const override { return "1"; }
};

class ShortAnnotator : public ErcAnnotator {
 public:
  std::vector<EmotionLabel> annotate(const Dialogue&) const override {
    return {EmotionLabel::Joy};
  }
  std::string name() const override { return "short"; }
  std::string version() const override { return "1"; }
};

}  // namespace

TEST_SUITE("erc") {

TEST_CASE("emotion names parse and serialize capitalized") {
  CHECK(emotion_name(EmotionLabel::Joy) == "Joy");
  CHECK(parse_emotion("Sadness") == EmotionLabel::Sadness);
  CHECK_THROWS_AS(parse_emotion("happy"), std::invalid_argument);
  CHECK(is_negative_emotion(EmotionLabel::Anger));
  CHECK(is_negative_emotion(EmotionLabel::Sadness));
  CHECK_FALSE(is_negative_emotion(EmotionLabel::Joy));
  CHECK_FALSE(is_negative_emotion(EmotionLabel::Neutral));
}

TEST_CASE("lexicon stub labels by the first matching word") {
  LexiconAnnotator annotator({{"dreadful", EmotionLabel::Anger}});
  CHECK(annotator.label_text("the weather is dreadful") == EmotionLabel::Anger);
  CHECK(annotator.label_text("nothing emotional here") == EmotionLabel::Neutral);

  LexiconAnnotator two({{"dreadful", EmotionLabel::Anger}, {"happy", EmotionLabel::Joy}});
  CHECK(two.label_text("happy but dreadful") == EmotionLabel::Joy);
  CHECK(two.label_text("dreadful but happy") == EmotionLabel::Anger);
  CHECK(two.label_text("DREADFUL!") == EmotionLabel::Anger);  // case-insensitive
}

TEST_CASE("lexicon stub is pure") {
  LexiconAnnotator annotator({{"glad", EmotionLabel::Joy}});
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    std::string text = "word" + std::to_string(rng_index(rng, 9)) + (i % 2 ? " glad" : " thing");
    CHECK(annotator.label_text(text) == annotator.label_text(text));
  }
}

TEST_CASE("default lexicon reproduces the reference annotations") {
  LexiconAnnotator annotator = LexiconAnnotator::with_default_lexicon();
  Dialogue d = make_dialogue(
      "case",
      {{"Agent", "Good morning, Mrs. Thompson! How are you feeling today?"},
       {"Mrs. Thompson",
        "Oh, everything is falling apart! My arthritis is acting up, my cat ran away, and the "
        "weather outside is simply dreadful!"}},
      "Mrs. Thompson");
  auto labels = annotator.annotate(d);
  REQUIRE(labels.size() == 2);
  CHECK(labels[0] == EmotionLabel::Joy);
  CHECK(labels[1] == EmotionLabel::Anger);
}

TEST_CASE("empty lexicon is rejected") {
  CHECK_THROWS_AS(LexiconAnnotator({}), std::invalid_argument);
}

TEST_CASE("the bundled lexicon file matches the built-in default") {
  std::filesystem::path data = std::filesystem::path(PRC_SOURCE_DIR) / "data";
  LexiconAnnotator bundled = LexiconAnnotator::from_file(data / "emotion_lexicon.json");
  LexiconAnnotator defaults = LexiconAnnotator::with_default_lexicon();
  CHECK(bundled.lexicon() == defaults.lexicon());
}

TEST_CASE("annotate_dialogue returns one label per utterance") {
  Rng rng(7);
  LexiconAnnotator annotator = LexiconAnnotator::with_default_lexicon();
  for (int i = 0; i < 50; ++i) {
    Dialogue d = random_dialogue(rng, "d" + std::to_string(i));
    CHECK(annotate_dialogue(annotator, d).size() == d.utterances.size());
  }
}

TEST_CASE("cache round-trips labels and serves repeat calls") {
  TempDir dir("erc-cache");
  AnnotationCache cache(dir.path);
  CountingAnnotator annotator("1");
  Rng rng(9);
  Dialogue d = random_dialogue(rng, "d0");

  auto first = annotate_dialogue(annotator, d, &cache);
  CHECK(annotator.calls == 1);
  auto second = annotate_dialogue(annotator, d, &cache);
  CHECK(annotator.calls == 1);  // served from cache
  CHECK(first == second);

  // A fresh cache object reads the persisted entry.
  AnnotationCache reopened(dir.path);
  auto stored = reopened.get(annotator.id(), d.dialogue_id);
  REQUIRE(stored.has_value());
  CHECK(*stored == first);
}

TEST_CASE("cache never serves labels across annotator versions") {
  TempDir dir("erc-cache-version");
  AnnotationCache cache(dir.path);
  CountingAnnotator v1("1");
  CountingAnnotator v2("2");
  Rng rng(9);
  Dialogue d = random_dialogue(rng, "d0");

  annotate_dialogue(v1, d, &cache);
  annotate_dialogue(v2, d, &cache);
  CHECK(v1.calls == 1);
  CHECK(v2.calls == 1);  // version miss forced a fresh annotation
  CHECK_FALSE(cache.get("counting@3", d.dialogue_id).has_value());
}

TEST_CASE("annotation is whole-dialogue atomic") {
  TempDir dir("erc-atomic");
  AnnotationCache cache(dir.path);
  Rng rng(9);
  Dialogue d = random_dialogue(rng, "d0");

  FailingAnnotator failing;
  CHECK_THROWS_AS(annotate_dialogue(failing, d, &cache), std::runtime_error);
  CHECK_FALSE(cache.get(failing.id(), d.dialogue_id).has_value());

  ShortAnnotator wrong_length;
  if (d.utterances.size() > 1) {
    CHECK_THROWS_AS(annotate_dialogue(wrong_length, d, &cache), std::runtime_error);
    CHECK_FALSE(cache.get(wrong_length.id(), d.dialogue_id).has_value());
  }
}

TEST_CASE("fixed annotator serves the stored labels and only those") {
  SyntheticCorpus corpus = generate_synthetic_corpus({.dialogue_count = 5, .seed = 3});
  FixedAnnotator annotator = corpus.annotator();
  auto labels = annotator.annotate(corpus.dialogues[0]);
  CHECK(labels == corpus.emotions.at(corpus.dialogues[0].dialogue_id));

  Dialogue unknown = make_dialogue("unknown", {{"Sam", "hi"}}, "Sam");
  CHECK_THROWS_AS(annotator.annotate(unknown), std::runtime_error);
}

TEST_CASE("fixed annotator slices its labels for flow prefixes") {
  SyntheticCorpus corpus = generate_synthetic_corpus({.dialogue_count = 6, .seed = 11});
  FixedAnnotator annotator = corpus.annotator();
  const Dialogue& d = corpus.dialogues[0];
  Dialogue prefix = flow_prefix(d, 0.25);
  auto labels = annotator.annotate(prefix);
  REQUIRE(labels.size() == prefix.utterances.size());
  const auto& full = corpus.emotions.at(d.dialogue_id);
  for (std::size_t i = 0; i < labels.size(); ++i) CHECK(labels[i] == full[i]);
}

TEST_CASE("cached full-dialogue labels never serve a shorter prefix") {
  TempDir dir("erc-prefix-cache");
  AnnotationCache cache(dir.path);
  SyntheticCorpus corpus = generate_synthetic_corpus({.dialogue_count = 3, .seed = 12});
  FixedAnnotator annotator = corpus.annotator();
  const Dialogue& d = corpus.dialogues[0];
  auto full = annotate_dialogue(annotator, d, &cache);
  Dialogue prefix = flow_prefix(d, 0.25);
  auto sliced = annotate_dialogue(annotator, prefix, &cache);
  CHECK(sliced.size() == prefix.utterances.size());
  // The full entry is still intact afterwards.
  CHECK(annotate_dialogue(annotator, d, &cache) == full);
}

TEST_CASE("fixed annotator can be rebuilt from a cache directory") {
  TempDir dir("erc-fixed");
  AnnotationCache cache(dir.path);
  SyntheticCorpus corpus = generate_synthetic_corpus({.dialogue_count = 4, .seed = 8});
  corpus.fill_cache(cache);

  FixedAnnotator rebuilt = FixedAnnotator::from_cache_dir(dir.path, "oracle@1");
  CHECK(rebuilt.id() == "oracle@1");
  for (const Dialogue& d : corpus.dialogues) {
    CHECK(rebuilt.annotate(d) == corpus.emotions.at(d.dialogue_id));
  }
}

TEST_CASE("train_erc learns a keyword-separable task to high held-out accuracy") {
  // Gold label is a deterministic function of one planted keyword.
  const std::array<std::string, kEmotionCount> keywords = {
      "zargle", "blicket", "frumble", "jubilant", "sornful", "peculiar", "ordinary"};
  Rng rng(13);
  std::vector<ErcLabeledDialogue> corpus;
  for (int d = 0; d < 120; ++d) {
    ErcLabeledDialogue item;
    std::vector<std::pair<std::string, std::string>> turns;
    for (int i = 0; i < 10; ++i) {
      std::size_t cls = rng_index(rng, kEmotionCount);
      std::string text = "filler" + std::to_string(rng_index(rng, 30)) + " " + keywords[cls] +
                         " tail" + std::to_string(rng_index(rng, 30));
      turns.emplace_back(i % 2 == 0 ? "Sam" : "Riley", text);
      item.emotions.push_back(static_cast<EmotionLabel>(cls));
    }
    item.dialogue = make_dialogue("erc" + std::to_string(d), turns, "Sam");
    corpus.push_back(std::move(item));
  }

  ErcTrainConfig config;
  config.epochs = 12;
  config.learning_rate = 0.05;
  config.hash_dim = 2048;
  config.seed = 1;
  ErcTrainResult result = train_erc(config, corpus);
  CHECK(result.validation_accuracy >= 0.95);

  // Fresh texts with the planted keywords classify correctly.
  for (std::size_t c = 0; c < kEmotionCount; ++c) {
    std::string text = "completely new sentence with " + keywords[c] + " inside";
    CHECK(result.annotator->classify(text, true) == static_cast<EmotionLabel>(c));
  }
}

TEST_CASE("trained annotator round-trips through its file format") {
  TempDir dir("erc-model");
  std::vector<ErcLabeledDialogue> corpus;
  Rng rng(2);
  for (int d = 0; d < 10; ++d) {
    ErcLabeledDialogue item;
    std::vector<std::pair<std::string, std::string>> turns;
    for (int i = 0; i < 6; ++i) {
      bool joyful = rng_uniform(rng) < 0.5;
      turns.emplace_back("Sam", joyful ? "sunny parade" : "gray drizzle");
      item.emotions.push_back(joyful ? EmotionLabel::Joy : EmotionLabel::Sadness);
    }
    item.dialogue = make_dialogue("e" + std::to_string(d), turns, "Sam");
    corpus.push_back(std::move(item));
  }
  ErcTrainResult result = train_erc({.epochs = 6, .learning_rate = 0.05, .hash_dim = 512}, corpus);
  result.annotator->save(dir.path / "erc.json");
  auto loaded = TrainedErcAnnotator::load(dir.path / "erc.json");
  CHECK(loaded->version() == result.annotator->version());
  CHECK(loaded->classify("sunny parade", true) == result.annotator->classify("sunny parade", true));
}

TEST_CASE("load_erc_corpus rejects unseen label names") {
  TempDir dir("erc-labels");
  write_file(dir.path / "corpus.jsonl",
             R"({"dialogue_id":"a","target_speaker":"Sam",)"
             R"("utterances":[{"speaker":"Sam","text":"hi","emotion":"Cheerful"}]})"
             "\n");
  CHECK_THROWS_AS(load_erc_corpus(dir.path / "corpus.jsonl"), std::runtime_error);
}

}  // TEST_SUITE
