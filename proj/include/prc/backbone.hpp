#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>

#include "prc/nli.hpp"

#include <json.hpp>

namespace prc {

enum class ModelFamily { mask_filling, seq2seq, causal };

std::string_view family_name(ModelFamily f);
ModelFamily parse_family(std::string_view name);

struct VerbalizerPair {
  double yes = 0.0;
  double no = 0.0;
};

/// Input-length policy. Utterances are capped at utterance_max_len tokens
/// and premises at dialogue_max_len utterances before the total token budget
/// applies; overflow drops the oldest premise utterances first. The
/// hypothesis and the question are never truncated.
struct PromptBudget {
  int utterance_max_len = 256;
  int dialogue_max_len = 20;
  int max_input_tokens = 1024;
};

NliPrompt apply_budget(const NliPrompt& prompt, const PromptBudget& budget);

/// Whitespace-separated token count of the serialized prompt.
std::size_t prompt_token_count(const NliPrompt& prompt);

/// The text a model of the given family actually consumes: mask-filling
/// keeps the literal marker, seq2seq swaps it for a decoder sentinel, causal
/// drops the mask tail and scores the continuation.
std::string realize_model_input(const NliPrompt& prompt, ModelFamily family);

/// Maps a prompt to the probability masses of the verbalizer answers "yes"
/// and "no" under the model's full output distribution. Deterministic in
/// evaluation mode for fixed parameters.
class BackboneAdapter {
 public:
  virtual ~BackboneAdapter() = default;

  virtual ModelFamily family() const = 0;
  virtual std::string name() const = 0;

  const PromptBudget& budget() const { return budget_; }
  int max_input_tokens() const { return budget_.max_input_tokens; }

  /// Applies the budget, scores the truncated prompt, and checks the
  /// returned masses (each in [0,1], summing to at most 1).
  VerbalizerPair verbalizer_probs(const NliPrompt& prompt);

 protected:
  explicit BackboneAdapter(PromptBudget budget) : budget_(budget) {}
  virtual VerbalizerPair score_prompt(const NliPrompt& truncated) = 0;

  PromptBudget budget_;
};

/// Same pair for every prompt.
class ConstantAdapter : public BackboneAdapter {
 public:
  ConstantAdapter(double p_yes, double p_no, PromptBudget budget = {});

  ModelFamily family() const override { return ModelFamily::mask_filling; }
  std::string name() const override { return "constant"; }

 protected:
  VerbalizerPair score_prompt(const NliPrompt&) override { return pair_; }

 private:
  VerbalizerPair pair_;
};

/// Recorded scores keyed by the serialized prompt. Unknown prompts are an
/// error unless a default pair is set.
class FixedTableAdapter : public BackboneAdapter {
 public:
  explicit FixedTableAdapter(PromptBudget budget = {});

  void add(const NliPrompt& prompt, VerbalizerPair pair);
  void add_serialized(std::string serialized, VerbalizerPair pair);
  void set_default(VerbalizerPair pair);

  static FixedTableAdapter from_file(const std::filesystem::path& path, PromptBudget budget = {});
  void save(const std::filesystem::path& path) const;

  ModelFamily family() const override { return ModelFamily::mask_filling; }
  std::string name() const override { return "recorded"; }

 protected:
  VerbalizerPair score_prompt(const NliPrompt& truncated) override;

 private:
  std::map<std::string, VerbalizerPair> table_;
  bool has_default_ = false;
  VerbalizerPair default_pair_;
};

/// Adapter whose parameters can be fitted. fit_step performs one gradient
/// update on the mean per-prompt loss of the batch and returns that
/// pre-update mean loss. Training-mode adapters are single-writer.
class TrainableAdapter : public BackboneAdapter {
 public:
  using BackboneAdapter::BackboneAdapter;

  virtual double fit_step(std::span<const NliSample> batch) = 0;
  virtual void set_training(bool training) { training_ = training; }
  bool is_training() const { return training_; }

  virtual nlohmann::json state_to_json() const = 0;
  virtual void load_state(const nlohmann::json& state) = 0;

 protected:
  bool training_ = false;
};

}  // namespace prc
