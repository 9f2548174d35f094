#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "prc/corpus.hpp"
#include "prc/erc.hpp"

namespace prc {

/// The four description templates, keyed by (first utterance?, target
/// speaker?). Placeholders: {speaker} and {emotion}.
struct AffectiveTemplates {
  std::string first_target = "({speaker} is initially {emotion})";
  std::string first_other = "(At the beginning, {speaker} is {emotion})";
  std::string later_target = "({speaker} responds with {emotion})";
  std::string later_other = "(Then, {speaker} turns to be {emotion})";

  static AffectiveTemplates from_file(const std::filesystem::path& path);
};

struct AffectiveUtterance {
  Utterance utterance;
  EmotionLabel emotion;
  std::string description;  // rendered template
};

struct AffectiveDialogue {
  std::string dialogue_id;
  std::vector<AffectiveUtterance> items;
  std::string target_speaker;
};

/// Wraps every utterance with its affective description. The speaker slot
/// holds the target speaker's name for target utterances; for the rest it
/// holds the other speaker's name in two-party dialogues and "the others"
/// otherwise.
AffectiveDialogue build_affective_content(const Dialogue& dialogue,
                                          const std::vector<EmotionLabel>& emotions,
                                          const AffectiveTemplates& templates = {});

/// One line per utterance: "Speaker: text description".
std::string render_affective_text(const AffectiveDialogue& ad);

/// One line per utterance without the descriptions: "Speaker: text".
std::string render_plain_text(const AffectiveDialogue& ad);

}  // namespace prc
