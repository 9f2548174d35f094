#include "prc/session.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "prc/affective.hpp"
#include "prc/nli.hpp"
#include "prc/text.hpp"

#include <json.hpp>

namespace prc {

using ordered_json = nlohmann::ordered_json;

SessionState::SessionState(TraitModels models, const ErcAnnotator& annotator,
                           SessionConfig config, AnnotationCache* cache)
    : models_(std::move(models)),
      annotator_(annotator),
      config_(std::move(config)),
      cache_(cache) {
  if (config_.target_speaker.empty()) {
    throw std::invalid_argument("session needs a target speaker");
  }
  if (!(config_.delta > 0.0 && config_.delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0,1)");
  }
  for (Trait t : kAllTraits) {
    if (!models_.contains(t)) {
      throw std::invalid_argument("session needs a model for trait " +
                                  std::string(trait_code(t)));
    }
    pipelines_.emplace(t, RunPipeline::resolve(models_.at(t).config));
  }
}

TurnOutcome SessionState::add_turn(const std::string& speaker, const std::string& text) {
  if (trim(text).empty()) throw std::invalid_argument("turn text must be non-empty");
  if (!config_.registered_speakers.empty() &&
      std::find(config_.registered_speakers.begin(), config_.registered_speakers.end(),
                speaker) == config_.registered_speakers.end()) {
    throw std::invalid_argument("unregistered speaker: " + speaker);
  }

  Utterance u;
  u.index = static_cast<int>(transcript_.size());
  u.speaker_id = speaker;
  u.text = text;
  u.is_target = speaker == config_.target_speaker;
  transcript_.push_back(u);

  TurnOutcome outcome;
  outcome.turn = static_cast<int>(transcript_.size());
  outcome.speaker = speaker;
  if (!u.is_target) return outcome;

  // Rebuild from the whole transcript: emotion labels depend on context.
  Dialogue dialogue;
  dialogue.dialogue_id = "session:" + std::to_string(transcript_.size()) + ":" +
                         std::to_string(fnv1a64(render_transcript()));
  dialogue.target_speaker = config_.target_speaker;
  dialogue.utterances = transcript_;

  outcome.predicted = true;
  for (Trait t : kAllTraits) {
    const RunPipeline& pipeline = pipelines_.at(t);
    AffectiveDialogue ad = pipeline.wrap(dialogue, annotator_, cache_);
    TraitPrediction pred = pipeline.predict(ad, *models_.at(t).adapter);
    outcome.confidence[trait_index(t)] = pred.confidence;
  }

  // Trigger rule: above delta and the strict maximum of the five.
  std::size_t best = 0;
  for (std::size_t i = 1; i < kTraitCount; ++i) {
    if (outcome.confidence[i] > outcome.confidence[best]) best = i;
  }
  bool strict_max = true;
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    if (i != best && outcome.confidence[i] == outcome.confidence[best]) strict_max = false;
  }
  Trait best_trait = static_cast<Trait>(best);
  if (strict_max && outcome.confidence[best] > config_.delta && !triggered_.contains(best_trait)) {
    triggered_.insert(best_trait);
    outcome.trigger = best_trait;
  }
  return outcome;
}

std::string SessionState::render_transcript() const {
  std::string out;
  for (const Utterance& u : transcript_) {
    out += u.speaker_id;
    out += '\x1f';
    out += u.text;
    out += '\x1e';
  }
  return out;
}

std::optional<std::pair<std::string, std::string>> parse_turn_line(const std::string& line) {
  std::size_t colon = line.find(':');
  if (colon == std::string::npos) return std::nullopt;
  std::string speaker = trim(line.substr(0, colon));
  std::string text = trim(line.substr(colon + 1));
  if (speaker.empty() || text.empty()) return std::nullopt;
  return std::pair{std::move(speaker), std::move(text)};
}

namespace {

std::string percent(double confidence) {
  return std::to_string(static_cast<int>(std::lround(confidence * 100.0))) + "%";
}

}  // namespace

void run_session(std::istream& in, std::ostream& out, std::ostream& events, SessionState& state) {
  out << "turn";
  for (Trait t : kAllTraits) out << '\t' << trait_code(t);
  out << '\n';

  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto turn = parse_turn_line(line);
    if (!turn) {
      out << "! expected \"name: text\"\n";
      continue;
    }
    TurnOutcome outcome;
    try {
      outcome = state.add_turn(turn->first, turn->second);
    } catch (const std::invalid_argument& e) {
      out << "! " << e.what() << '\n';
      continue;
    }
    out << outcome.turn;
    if (outcome.predicted) {
      for (double c : outcome.confidence) out << '\t' << percent(c);
    } else {
      for (std::size_t i = 0; i < kTraitCount; ++i) out << '\t' << '-';
    }
    out << '\n';
    if (outcome.trigger) {
      ordered_json event;
      event["event"] = "trigger";
      event["turn"] = outcome.turn;
      event["trait"] = std::string(trait_code(*outcome.trigger));
      event["confidence"] = outcome.confidence[trait_index(*outcome.trigger)];
      event["delta"] = state.config().delta;
      events << event.dump() << '\n';
      out << "* trigger: " << trait_code(*outcome.trigger) << " at "
          << percent(outcome.confidence[trait_index(*outcome.trigger)]) << '\n';
    }
  }
}

}  // namespace prc
