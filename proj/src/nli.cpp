#include "prc/nli.hpp"

#include <cmath>
#include <stdexcept>

#include "prc/backbone.hpp"

namespace prc {

std::string NliPrompt::serialize() const {
  std::string out = premise;
  out += ' ';
  out += hypothesis;
  out += ' ';
  out += kNliQuestion;
  out += ' ';
  out += kMaskMarker;
  out += '.';
  return out;
}

std::string_view answer_token(Answer a) { return a == Answer::yes ? "yes" : "no"; }

void ScoreQuad::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(p_pos_yes) || !in_unit(p_pos_no) || !in_unit(p_neg_yes) || !in_unit(p_neg_no)) {
    throw std::domain_error("ScoreQuad probabilities must lie in [0,1]");
  }
  double pos_mass = p_pos_yes + p_pos_no;
  double neg_mass = p_neg_yes + p_neg_no;
  if (pos_mass <= 0.0 || pos_mass > 1.0 + 1e-12 || neg_mass <= 0.0 || neg_mass > 1.0 + 1e-12) {
    throw std::domain_error("per-prompt verbalizer mass must lie in (0,1]");
  }
}

std::pair<NliPrompt, NliPrompt> build_prompts(const AffectiveDialogue& ad, Trait trait,
                                              const DescriptionRegistry& registry,
                                              const PromptOptions& options) {
  std::string premise = options.affective ? render_affective_text(ad) : render_plain_text(ad);
  NliPrompt pos{premise, registry.render_hypothesis(ad.target_speaker, trait, Polarity::positive)};
  NliPrompt neg{std::move(premise),
                registry.render_hypothesis(ad.target_speaker, trait, Polarity::negative)};
  return {std::move(pos), std::move(neg)};
}

std::vector<NliSample> make_training_samples(const AffectiveDialogue& ad, Trait trait, int y_p,
                                             const DescriptionRegistry& registry,
                                             const PromptOptions& options, bool only_pos) {
  if (y_p != 0 && y_p != 1) throw std::invalid_argument("y_p must be 0 or 1");
  auto [pos, neg] = build_prompts(ad, trait, registry, options);

  std::vector<NliSample> samples;
  samples.push_back({std::move(pos), y_p == 1 ? Answer::yes : Answer::no, ad.dialogue_id, trait,
                     Polarity::positive});
  if (!only_pos) {
    samples.push_back({std::move(neg), y_p == 1 ? Answer::no : Answer::yes, ad.dialogue_id, trait,
                       Polarity::negative});
  }
  return samples;
}

ScoreQuad score(BackboneAdapter& adapter, const std::pair<NliPrompt, NliPrompt>& prompts) {
  VerbalizerPair pos = adapter.verbalizer_probs(prompts.first);
  VerbalizerPair neg = adapter.verbalizer_probs(prompts.second);
  ScoreQuad quad{pos.yes, pos.no, neg.yes, neg.no};
  quad.validate();
  return quad;
}

namespace {

double renormalized_gold_prob(double p_yes, double p_no, Answer gold) {
  double mass = p_yes + p_no;
  if (mass <= 0.0) {
    throw std::domain_error("zero verbalizer mass: adapter assigns no probability to yes/no");
  }
  return (gold == Answer::yes ? p_yes : p_no) / mass;
}

}  // namespace

double training_loss(const ScoreQuad& quad, int y_p) {
  if (y_p != 0 && y_p != 1) throw std::invalid_argument("y_p must be 0 or 1");
  Answer pos_gold = y_p == 1 ? Answer::yes : Answer::no;
  Answer neg_gold = y_p == 1 ? Answer::no : Answer::yes;
  double q_pos = renormalized_gold_prob(quad.p_pos_yes, quad.p_pos_no, pos_gold);
  double q_neg = renormalized_gold_prob(quad.p_neg_yes, quad.p_neg_no, neg_gold);
  if (q_pos <= 0.0 || q_neg <= 0.0) {
    throw std::domain_error("gold answer has zero renormalized probability");
  }
  return -std::log(q_pos) - std::log(q_neg);
}

TraitPrediction infer_trait(const ScoreQuad& quad, Trait trait) {
  double s_pos = quad.positive_sum();
  double s_neg = quad.negative_sum();
  TraitPrediction pred;
  pred.trait = trait;
  pred.tie = s_pos == s_neg;
  pred.label = s_pos > s_neg ? 1 : 0;
  pred.confidence = s_pos / (s_pos + s_neg);
  return pred;
}

TraitPrediction infer_trait_single(double p_yes, double p_no, Trait trait) {
  double mass = p_yes + p_no;
  if (mass <= 0.0) throw std::domain_error("zero verbalizer mass in single-prompt inference");
  TraitPrediction pred;
  pred.trait = trait;
  pred.tie = p_yes == p_no;
  pred.label = p_yes > p_no ? 1 : 0;
  pred.confidence = p_yes / mass;
  return pred;
}

}  // namespace prc
