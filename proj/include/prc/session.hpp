#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "prc/eval.hpp"

namespace prc {

struct SessionConfig {
  std::string target_speaker;
  double delta = 0.6;  // trigger threshold, must lie in (0,1)
  std::vector<std::string> registered_speakers;  // empty accepts any name
};

struct TurnOutcome {
  int turn = 0;  // 1-based transcript position
  std::string speaker;
  bool predicted = false;                       // target turns refresh predictions
  std::array<double, kTraitCount> confidence{};  // valid when predicted
  std::optional<Trait> trigger;                  // newly triggered trait, if any
};

/// Streaming recognition state: a growing transcript whose predictions are
/// recomputed from scratch after every target-speaker turn (emotion labels
/// are context-dependent). Predictions are a pure function of the
/// transcript prefix. A trait triggers once, the first time its confidence
/// exceeds delta while being the strict maximum among the five.
class SessionState {
 public:
  SessionState(TraitModels models, const ErcAnnotator& annotator, SessionConfig config,
               AnnotationCache* cache = nullptr);

  TurnOutcome add_turn(const std::string& speaker, const std::string& text);

  const std::vector<Utterance>& transcript() const { return transcript_; }
  const std::set<Trait>& triggered() const { return triggered_; }
  const SessionConfig& config() const { return config_; }

 private:
  std::string render_transcript() const;

  TraitModels models_;
  std::map<Trait, RunPipeline> pipelines_;
  const ErcAnnotator& annotator_;
  SessionConfig config_;
  AnnotationCache* cache_;
  std::vector<Utterance> transcript_;
  std::set<Trait> triggered_;
};

/// Parses "name: text". Returns nothing for lines without a colon, an empty
/// name, or empty text.
std::optional<std::pair<std::string, std::string>> parse_turn_line(const std::string& line);

/// Line-oriented REPL: reads turns from `in`, prints the Table-style
/// confidence rows to `out`, and emits one JSON object per trigger event to
/// `events`. Malformed lines prompt again without touching the state.
void run_session(std::istream& in, std::ostream& out, std::ostream& events, SessionState& state);

}  // namespace prc
