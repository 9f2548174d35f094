#pragma once

#include <string>
#include <utility>
#include <vector>

#include "prc/affective.hpp"
#include "prc/hypotheses.hpp"

namespace prc {

class BackboneAdapter;

inline constexpr std::string_view kNliQuestion = "Is it correct?";
inline constexpr std::string_view kMaskMarker = "[MASK]";

/// Entailment prompt: premise, hypothesis, then the fixed question with a
/// mask slot. serialize() is the byte-exact contract with adapters.
struct NliPrompt {
  std::string premise;
  std::string hypothesis;

  /// "<premise> <hypothesis> Is it correct? [MASK]." with single spaces
  /// between the segments.
  std::string serialize() const;

  bool operator==(const NliPrompt&) const = default;
};

enum class Answer { yes, no };

std::string_view answer_token(Answer a);  // "yes" / "no"

struct NliSample {
  NliPrompt prompt;
  Answer gold;
  std::string dialogue_id;
  Trait trait{};
  Polarity polarity{};
};

/// The four verbalizer masses for one (dialogue, trait):
/// P_pos(yes), P_pos(no), P_neg(yes), P_neg(no).
struct ScoreQuad {
  double p_pos_yes = 0.0;
  double p_pos_no = 0.0;
  double p_neg_yes = 0.0;
  double p_neg_no = 0.0;

  double positive_sum() const { return p_pos_yes + p_neg_no; }
  double negative_sum() const { return p_neg_yes + p_pos_no; }

  /// Throws unless each probability is in [0,1] and each per-prompt
  /// verbalizer mass lies in (0,1].
  void validate() const;
};

struct TraitPrediction {
  Trait trait{};
  int label = 0;
  double confidence = 0.0;  // positive_sum / (positive_sum + negative_sum)
  bool tie = false;
};

struct PromptOptions {
  bool affective = true;  // false renders the premise from the raw dialogue
};

/// (T_pos, T_neg): identical premise, hypotheses of opposite polarity.
std::pair<NliPrompt, NliPrompt> build_prompts(const AffectiveDialogue& ad, Trait trait,
                                              const DescriptionRegistry& registry,
                                              const PromptOptions& options = {});

/// Gold answers follow the label: y=1 gives {(T_pos, yes), (T_neg, no)},
/// y=0 swaps them. With only_pos set, just the positive-polarity sample is
/// produced.
std::vector<NliSample> make_training_samples(const AffectiveDialogue& ad, Trait trait, int y_p,
                                             const DescriptionRegistry& registry,
                                             const PromptOptions& options = {},
                                             bool only_pos = false);

/// Queries the adapter once per prompt and packs the verbalizer masses.
ScoreQuad score(BackboneAdapter& adapter, const std::pair<NliPrompt, NliPrompt>& prompts);

/// Sum of the two per-prompt cross-entropies, each renormalized over
/// {yes, no}. Throws when a prompt has zero verbalizer mass.
double training_loss(const ScoreQuad& quad, int y_p);

/// Label 1 iff P_pos(yes)+P_neg(no) > P_neg(yes)+P_pos(no); equal sums give
/// label 0 with the tie flag set.
TraitPrediction infer_trait(const ScoreQuad& quad, Trait trait);

/// only-positive variant: decision between the yes and no masses of the
/// single positive prompt.
TraitPrediction infer_trait_single(double p_yes, double p_no, Trait trait);

}  // namespace prc
