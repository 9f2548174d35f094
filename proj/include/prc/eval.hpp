#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "prc/trainer.hpp"

namespace prc {

struct TraitModel {
  std::shared_ptr<BackboneAdapter> adapter;
  RunConfig config;
};

using TraitModels = std::map<Trait, TraitModel>;

TraitModels models_from_checkpoints(const std::map<Trait, Checkpoint>& checkpoints);

struct FlowPoint {
  double fraction = 1.0;
  std::array<double, kTraitCount> per_trait{};
  double average = 0.0;
  /// Mean target-utterance count of the raw ceil-prefixes, before the
  /// at-least-one-target extension.
  double mean_target_utterances = 0.0;
  /// Dialogues whose prefix had to be extended to include a target turn.
  std::size_t extended_dialogues = 0;
  std::vector<std::string> extended_dialogue_ids;

  bool operator==(const FlowPoint&) const = default;
};

struct EvalReport {
  std::string task = "overall";  // "overall" or "flow"
  std::size_t dialogue_count = 0;
  std::string annotator_id;
  std::array<double, kTraitCount> per_trait{};
  double average = 0.0;
  std::vector<FlowPoint> fractions;  // flow only

  // Filled by aggregate_reports.
  std::size_t seed_count = 1;
  std::array<double, kTraitCount> per_trait_std{};
  double average_std = 0.0;

  bool operator==(const EvalReport&) const = default;
};

/// Full-length recognition: annotate, wrap, prompt, score, infer for every
/// (dialogue, trait). One model per trait is required.
EvalReport evaluate_overall(const TraitModels& models, std::span<const Dialogue> test,
                            const ErcAnnotator& annotator, AnnotationCache* cache = nullptr);

/// Prefix-based recognition at the given fractions. Every dialogue is
/// evaluated at every fraction; fraction 1.0 coincides with the Overall
/// numbers exactly.
EvalReport evaluate_flow(const TraitModels& models, std::span<const Dialogue> test,
                         const ErcAnnotator& annotator,
                         const std::vector<double>& fractions = {0.25, 0.5, 0.75, 1.0},
                         AnnotationCache* cache = nullptr);

/// Mean and sample standard deviation across runs (for example seeds).
EvalReport aggregate_reports(std::span<const EvalReport> reports);

/// "0.610±0.014" (three decimals).
std::string format_mean_std(double mean, double std_dev);

nlohmann::ordered_json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

/// Writes <stem>.json, <stem>.csv and <stem>.txt. The table rows are the
/// report's evaluation rows (overall, or one per flow fraction); columns
/// are AGR, CON, EXT, OPN, NEU, Avg.
void write_report(const EvalReport& report, const std::filesystem::path& stem);

}  // namespace prc
