#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>

#include "prc/backbone.hpp"

namespace prc {

// Output distribution over three tokens; the third soaks up the rest of the
// vocabulary mass so that p_yes + p_no < 1 like a real model.
inline constexpr int kYesIndex = 0;
inline constexpr int kNoIndex = 1;
inline constexpr int kVerbalizerVocab = 3;

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Per-prompt loss at the logit level: cross-entropy of the gold answer
/// after renormalizing the softmax over the yes/no entries.
double renorm_ce_loss_from_logits(const Eigen::VectorXd& logits, Answer gold);

/// Analytic gradient of renorm_ce_loss_from_logits w.r.t. the logits.
Eigen::VectorXd renorm_ce_grad_from_logits(const Eigen::VectorXd& logits, Answer gold);

struct TinyAdapterConfig {
  int hash_dim = 8192;
  int hidden_dim = 16;
  double init_scale = 0.05;
  std::uint64_t init_seed = 1;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double weight_decay = 0.0;  // decoupled, applied to the weight matrices only
  ModelFamily family = ModelFamily::mask_filling;
  PromptBudget budget;
  bool head_only = false;  // parameter-efficient mode: freeze the feature layer

  nlohmann::json to_json() const;
  static TinyAdapterConfig from_json(const nlohmann::json& j);
};

/// Small trainable stand-in for a pre-trained backbone: hashed n-gram
/// features of the premise and hypothesis, one tanh hidden layer, softmax
/// over {yes, no, other}.
class TinyTextAdapter : public TrainableAdapter {
 public:
  explicit TinyTextAdapter(TinyAdapterConfig config);

  ModelFamily family() const override { return config_.family; }
  std::string name() const override { return "tiny"; }

  double fit_step(std::span<const NliSample> batch) override;

  void reset_parameters(std::uint64_t seed);

  nlohmann::json state_to_json() const override;
  void load_state(const nlohmann::json& state) override;

  const TinyAdapterConfig& config() const { return config_; }

  /// Logits for a prompt; exposed for gradient-check tests.
  Eigen::VectorXd logits(const NliPrompt& prompt) const;

 protected:
  VerbalizerPair score_prompt(const NliPrompt& truncated) override;

 private:
  struct Features;
  Features featurize(const NliPrompt& prompt) const;

  TinyAdapterConfig config_;
  Eigen::MatrixXd w1_;  // hidden x (2 * hash_dim)
  Eigen::VectorXd b1_;
  Eigen::MatrixXd w2_;  // vocab x hidden
  Eigen::VectorXd b2_;

  Eigen::MatrixXd m1_w1_, m2_w1_, m1_w2_, m2_w2_;
  Eigen::VectorXd m1_b1_, m2_b1_, m1_b2_, m2_b2_;
  long adam_step_ = 0;
};

std::unique_ptr<TinyTextAdapter> make_tiny_adapter(const TinyAdapterConfig& config);

/// Rebuilds a tiny adapter from a serialized state (config + parameters).
std::unique_ptr<TinyTextAdapter> tiny_adapter_from_state(const nlohmann::json& state);

/// Adapter construction from an identifier string with an optional family
/// tag: "tiny", "tiny:causal", "constant:<p_yes>,<p_no>",
/// "recorded:<scores.json>", "checkpoint:<state.json>".
std::unique_ptr<BackboneAdapter> make_adapter_from_spec(const std::string& spec,
                                                        PromptBudget budget = {});

}  // namespace prc
