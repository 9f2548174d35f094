#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prc/backbone.hpp"
#include "prc/corpus.hpp"
#include "prc/erc.hpp"
#include "prc/hypotheses.hpp"
#include "prc/tiny_adapter.hpp"

namespace prc {

enum class Ablation { full, no_affective, no_personality, only_pos };

std::string_view ablation_name(Ablation a);
Ablation parse_ablation(std::string_view name);

struct RunConfig {
  Trait trait = Trait::NEU;
  Ablation ablation = Ablation::full;
  int batch_size = 32;
  std::vector<double> learning_rate_grid = {1e-5, 2e-5, 5e-5};
  std::uint64_t seed = 1;
  int epochs = 10;
  bool skip_on_annotation_error = false;  // default aborts the run
  TinyAdapterConfig adapter;
  std::optional<std::filesystem::path> descriptions_path;
  std::optional<std::filesystem::path> templates_path;

  /// Registry the run's hypotheses come from: the no_personality ablation
  /// swaps in bare label names, otherwise the standard texts or the
  /// descriptions_path override.
  DescriptionRegistry registry() const;

  AffectiveTemplates templates() const;

  PromptOptions prompt_options() const {
    return {.affective = ablation != Ablation::no_affective};
  }
  bool only_pos() const { return ablation == Ablation::only_pos; }

  nlohmann::json to_json() const;

  /// Throws std::invalid_argument naming the offending field.
  static RunConfig from_json(const nlohmann::json& j);
};

/// RunConfig with its file-backed resources loaded once.
struct RunPipeline {
  DescriptionRegistry registry;
  AffectiveTemplates templates;
  PromptOptions options;
  bool only_pos = false;
  Trait trait = Trait::NEU;
  Ablation ablation = Ablation::full;

  static RunPipeline resolve(const RunConfig& config);

  AffectiveDialogue wrap(const Dialogue& dialogue, const ErcAnnotator& annotator,
                         AnnotationCache* cache) const;
  TraitPrediction predict(const AffectiveDialogue& ad, BackboneAdapter& adapter) const;
};

struct Checkpoint {
  nlohmann::json adapter_state;
  RunConfig config;
  double validation_accuracy = 0.0;
  int epoch = 0;
  double learning_rate = 0.0;

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

  std::unique_ptr<TinyTextAdapter> instantiate() const;
};

/// Emotion annotation per the ablation, then prompt + gold construction.
/// The no_affective mode skips annotation entirely.
std::vector<NliSample> build_samples(const RunConfig& config, std::span<const Dialogue> dialogues,
                                     const ErcAnnotator& annotator,
                                     AnnotationCache* cache = nullptr,
                                     std::ostream* log = nullptr);

using AdapterFactory =
    std::function<std::unique_ptr<TrainableAdapter>(const RunConfig&, double learning_rate)>;

AdapterFactory tiny_adapter_factory();

/// Accuracy of the trait decision over the given dialogues.
double trait_accuracy(const RunConfig& config, std::span<const Dialogue> dialogues,
                      const ErcAnnotator& annotator, BackboneAdapter& adapter,
                      AnnotationCache* cache = nullptr);

/// Runs the learning-rate grid, keeps the best-validation checkpoint per
/// rate, and returns the overall best (ties resolved toward the smaller
/// rate). `log` receives one JSON object per line per epoch.
Checkpoint train_trait_model(const RunConfig& config, const DatasetSplit& split,
                             const ErcAnnotator& annotator,
                             const AdapterFactory& factory = tiny_adapter_factory(),
                             AnnotationCache* cache = nullptr, std::ostream* log = nullptr);

/// Writes checkpoint.json, manifest.json (config hash, metrics, timestamps)
/// and metrics.jsonl into `dir`.
void save_run(const Checkpoint& checkpoint, const std::filesystem::path& dir,
              const std::string& metrics_jsonl);

}  // namespace prc
