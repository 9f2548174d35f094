#include "prc/synthetic.hpp"

#include "prc/text.hpp"

namespace prc {

namespace {

// A small closed pool keeps the text uninformative in practice as well as
// by construction: no filler combination can separate the training set, so
// the only usable signal is the emotion annotations.
const std::vector<std::string> kFillerSentences = {
    "Well, maybe we should talk about the plan.",
    "The meeting is tomorrow, right?",
    "I will see you later today.",
    "Thanks, that works for me.",
    "Okay, let me check the notes.",
    "Sure, the train leaves at nine.",
    "There is coffee in the room.",
    "Fine, we can sort that out next week.",
    "Anyway, the table by the window is free.",
    "Right, I will call about the street address.",
    "So the thing is on the schedule.",
    "Maybe later then, if that suits you.",
    "The room was booked for the afternoon.",
    "Okay then, see you about noon.",
    "That note was about the plan for today.",
    "Well then, the week looks pretty full."};

const std::vector<std::string> kTargetNames = {"Sam", "Alex", "Jordan", "Casey", "Robin", "Taylor"};
const std::vector<std::string> kOtherNames = {"Riley", "Morgan", "Jamie", "Quinn", "Avery", "Drew"};

const std::vector<EmotionLabel> kNegativeEmotions = {
    EmotionLabel::Anger, EmotionLabel::Disgust, EmotionLabel::Fear, EmotionLabel::Sadness};
// Other speakers stay non-negative so the negative-emotion count in the
// rendered content comes from the target speaker alone.
const std::vector<EmotionLabel> kNonNegativeEmotions = {
    EmotionLabel::Joy, EmotionLabel::Surprise, EmotionLabel::Neutral};

std::string filler_sentence(Rng& rng) {
  return kFillerSentences[rng_index(rng, kFillerSentences.size())];
}

}  // namespace

SyntheticCorpus generate_synthetic_corpus(const SyntheticConfig& config) {
  Rng rng(config.seed);
  SyntheticCorpus corpus;

  for (std::size_t d = 0; d < config.dialogue_count; ++d) {
    Dialogue dialogue;
    dialogue.dialogue_id = "syn-" + std::to_string(d);
    dialogue.target_speaker = kTargetNames[rng_index(rng, kTargetNames.size())];
    std::string other = kOtherNames[rng_index(rng, kOtherNames.size())];

    int m = config.min_utterances +
            static_cast<int>(rng_index(
                rng, static_cast<std::size_t>(config.max_utterances - config.min_utterances + 1)));
    std::vector<EmotionLabel> emotions;
    std::size_t negative_target_count = 0;
    for (int i = 0; i < m; ++i) {
      Utterance u;
      u.index = i;
      // Alternate speakers with a per-dialogue phase so the target also
      // opens dialogues sometimes.
      bool target_turn = (i + static_cast<int>(d)) % 2 == 0;
      u.speaker_id = target_turn ? dialogue.target_speaker : other;
      u.is_target = target_turn;
      u.text = filler_sentence(rng);

      EmotionLabel emotion;
      if (target_turn) {
        if (rng_uniform(rng) < config.negative_emotion_prob) {
          emotion = kNegativeEmotions[rng_index(rng, kNegativeEmotions.size())];
          ++negative_target_count;
        } else {
          emotion = kNonNegativeEmotions[rng_index(rng, kNonNegativeEmotions.size())];
        }
      } else {
        emotion = kNonNegativeEmotions[rng_index(rng, kNonNegativeEmotions.size())];
      }
      emotions.push_back(emotion);
      dialogue.utterances.push_back(std::move(u));
    }

    dialogue.labels[Trait::NEU] = negative_target_count >= 2 ? 1 : 0;
    for (Trait t : {Trait::AGR, Trait::CON, Trait::EXT, Trait::OPN}) {
      dialogue.labels[t] = rng_uniform(rng) < 0.5 ? 1 : 0;
    }

    corpus.emotions[dialogue.dialogue_id] = std::move(emotions);
    corpus.dialogues.push_back(std::move(dialogue));
  }
  return corpus;
}

FixedAnnotator SyntheticCorpus::annotator() const {
  return FixedAnnotator(emotions, kAnnotatorName, kAnnotatorVersion);
}

void SyntheticCorpus::fill_cache(AnnotationCache& cache) const {
  const std::string id = std::string(kAnnotatorName) + "@" + kAnnotatorVersion;
  for (const auto& [dialogue_id, labels] : emotions) cache.put(id, dialogue_id, labels);
}

}  // namespace prc
