#include "prc/trainer.hpp"

#include <chrono>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "prc/affective.hpp"
#include "prc/nli.hpp"
#include "prc/text.hpp"

namespace prc {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view ablation_name(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::no_affective: return "no_affective";
    case Ablation::no_personality: return "no_personality";
    case Ablation::only_pos: return "only_pos";
  }
  return "full";
}

Ablation parse_ablation(std::string_view name) {
  if (name == "full") return Ablation::full;
  if (name == "no_affective") return Ablation::no_affective;
  if (name == "no_personality") return Ablation::no_personality;
  if (name == "only_pos") return Ablation::only_pos;
  throw std::invalid_argument("unknown ablation: " + std::string(name));
}

DescriptionRegistry RunConfig::registry() const {
  if (ablation == Ablation::no_personality) return DescriptionRegistry::label_names();
  if (descriptions_path) return DescriptionRegistry::from_file(*descriptions_path);
  return DescriptionRegistry::standard();
}

AffectiveTemplates RunConfig::templates() const {
  if (templates_path) return AffectiveTemplates::from_file(*templates_path);
  return {};
}

RunPipeline RunPipeline::resolve(const RunConfig& config) {
  return {config.registry(), config.templates(), config.prompt_options(), config.only_pos(),
          config.trait,      config.ablation};
}

AffectiveDialogue RunPipeline::wrap(const Dialogue& dialogue, const ErcAnnotator& annotator,
                                    AnnotationCache* cache) const {
  std::vector<EmotionLabel> emotions;
  if (ablation == Ablation::no_affective) {
    // Premise ignores the descriptions, so skip annotation.
    emotions.assign(dialogue.utterances.size(), EmotionLabel::Neutral);
  } else {
    emotions = annotate_dialogue(annotator, dialogue, cache);
  }
  return build_affective_content(dialogue, emotions, templates);
}

TraitPrediction RunPipeline::predict(const AffectiveDialogue& ad,
                                     BackboneAdapter& adapter) const {
  auto prompts = build_prompts(ad, trait, registry, options);
  if (only_pos) {
    VerbalizerPair pair = adapter.verbalizer_probs(prompts.first);
    return infer_trait_single(pair.yes, pair.no, trait);
  }
  return infer_trait(score(adapter, prompts), trait);
}

json RunConfig::to_json() const {
  json j;
  j["trait"] = std::string(trait_code(trait));
  j["ablation"] = std::string(ablation_name(ablation));
  j["batch_size"] = batch_size;
  j["learning_rate_grid"] = learning_rate_grid;
  j["seed"] = seed;
  j["epochs"] = epochs;
  j["skip_on_annotation_error"] = skip_on_annotation_error;
  j["adapter"] = adapter.to_json();
  if (descriptions_path) j["descriptions_path"] = descriptions_path->string();
  if (templates_path) j["templates_path"] = templates_path->string();
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("run config field '" + field + "': " + why);
  };
  RunConfig c;
  if (!j.contains("trait")) fail("trait", "missing");
  if (!j["trait"].is_string()) fail("trait", "must be a string trait code");
  try {
    c.trait = parse_trait(j["trait"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail("trait", e.what());
  }
  if (j.contains("ablation")) {
    try {
      c.ablation = parse_ablation(j["ablation"].get<std::string>());
    } catch (const std::exception& e) {
      fail("ablation", e.what());
    }
  }
  c.batch_size = j.value("batch_size", c.batch_size);
  if (c.batch_size < 1) fail("batch_size", "must be at least 1");
  if (j.contains("learning_rate_grid")) {
    c.learning_rate_grid = j["learning_rate_grid"].get<std::vector<double>>();
  }
  if (c.learning_rate_grid.empty()) fail("learning_rate_grid", "must be non-empty");
  c.seed = j.value("seed", c.seed);
  c.epochs = j.value("epochs", c.epochs);
  if (c.epochs < 1) fail("epochs", "must be at least 1");
  c.skip_on_annotation_error = j.value("skip_on_annotation_error", c.skip_on_annotation_error);
  if (j.contains("adapter")) c.adapter = TinyAdapterConfig::from_json(j["adapter"]);
  if (!j.contains("learning_rate_grid") && c.adapter.head_only) {
    c.learning_rate_grid = {1e-4, 3e-4, 1e-3};  // parameter-efficient default
  }
  if (j.contains("utterance_max_len")) {
    c.adapter.budget.utterance_max_len = j["utterance_max_len"].get<int>();
  }
  if (j.contains("dialogue_max_len")) {
    c.adapter.budget.dialogue_max_len = j["dialogue_max_len"].get<int>();
  }
  if (j.contains("descriptions_path")) {
    c.descriptions_path = std::filesystem::path(j["descriptions_path"].get<std::string>());
  }
  if (j.contains("templates_path")) {
    c.templates_path = std::filesystem::path(j["templates_path"].get<std::string>());
  }
  return c;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  ordered_json j;
  j["config"] = config.to_json();
  j["validation_accuracy"] = validation_accuracy;
  j["epoch"] = epoch;
  j["learning_rate"] = learning_rate;
  j["adapter_state"] = adapter_state;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  out << j.dump() << '\n';
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
  json j = json::parse(in);
  Checkpoint c;
  c.config = RunConfig::from_json(j.at("config"));
  c.validation_accuracy = j.at("validation_accuracy").get<double>();
  c.epoch = j.at("epoch").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.adapter_state = j.at("adapter_state");
  return c;
}

std::unique_ptr<TinyTextAdapter> Checkpoint::instantiate() const {
  return tiny_adapter_from_state(adapter_state);
}

std::vector<NliSample> build_samples(const RunConfig& config, std::span<const Dialogue> dialogues,
                                     const ErcAnnotator& annotator, AnnotationCache* cache,
                                     std::ostream* log) {
  const RunPipeline pipeline = RunPipeline::resolve(config);

  std::vector<NliSample> samples;
  for (const Dialogue& dialogue : dialogues) {
    AffectiveDialogue ad;
    try {
      ad = pipeline.wrap(dialogue, annotator, cache);
    } catch (const std::exception& e) {
      if (!config.skip_on_annotation_error) throw;
      if (log) {
        *log << ordered_json{{"event", "skip"},
                             {"dialogue_id", dialogue.dialogue_id},
                             {"reason", e.what()}}
                    .dump()
             << '\n';
      }
      continue;
    }
    auto built = make_training_samples(ad, config.trait, dialogue.labels[config.trait],
                                       pipeline.registry, pipeline.options, pipeline.only_pos);
    for (NliSample& s : built) samples.push_back(std::move(s));
  }
  return samples;
}

AdapterFactory tiny_adapter_factory() {
  return [](const RunConfig& config, double learning_rate) {
    TinyAdapterConfig adapter_config = config.adapter;
    adapter_config.learning_rate = learning_rate;
    adapter_config.init_seed = config.seed;
    return make_tiny_adapter(adapter_config);
  };
}

double trait_accuracy(const RunConfig& config, std::span<const Dialogue> dialogues,
                      const ErcAnnotator& annotator, BackboneAdapter& adapter,
                      AnnotationCache* cache) {
  if (dialogues.empty()) throw std::invalid_argument("trait_accuracy: empty dialogue list");
  const RunPipeline pipeline = RunPipeline::resolve(config);

  std::size_t correct = 0;
  for (const Dialogue& dialogue : dialogues) {
    TraitPrediction pred =
        pipeline.predict(pipeline.wrap(dialogue, annotator, cache), adapter);
    correct += pred.label == dialogue.labels[config.trait] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(dialogues.size());
}

Checkpoint train_trait_model(const RunConfig& config, const DatasetSplit& split,
                             const ErcAnnotator& annotator, const AdapterFactory& factory,
                             AnnotationCache* cache, std::ostream* log) {
  if (config.learning_rate_grid.empty()) {
    throw std::invalid_argument("learning rate grid must be non-empty");
  }
  if (split.train.empty() || split.validation.empty()) {
    throw std::invalid_argument("train and validation splits must be non-empty");
  }

  std::vector<NliSample> train_samples = build_samples(config, split.train, annotator, cache, log);
  if (train_samples.empty()) throw std::runtime_error("no training samples were built");

  Checkpoint best;
  bool have_best = false;

  for (std::size_t lr_index = 0; lr_index < config.learning_rate_grid.size(); ++lr_index) {
    const double lr = config.learning_rate_grid[lr_index];
    std::unique_ptr<TrainableAdapter> adapter = factory(config, lr);

    Rng shuffle_rng(config.seed ^ (0x9e3779b97f4a7c15ULL * (lr_index + 1)));
    std::vector<std::size_t> order(train_samples.size());
    std::iota(order.begin(), order.end(), 0);

    Checkpoint lr_best;
    bool have_lr_best = false;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
      adapter->set_training(true);
      rng_shuffle(order, shuffle_rng);
      double loss_sum = 0.0;
      std::size_t batch_count = 0;
      std::vector<NliSample> batch;
      for (std::size_t start = 0; start < order.size();
           start += static_cast<std::size_t>(config.batch_size)) {
        std::size_t end =
            std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
        batch.clear();
        for (std::size_t i = start; i < end; ++i) batch.push_back(train_samples[order[i]]);
        loss_sum += adapter->fit_step(batch);
        ++batch_count;
      }
      adapter->set_training(false);
      double val_acc = trait_accuracy(config, split.validation, annotator, *adapter, cache);

      if (log) {
        *log << ordered_json{{"event", "epoch"},
                             {"learning_rate", lr},
                             {"epoch", epoch},
                             {"train_loss", loss_sum / static_cast<double>(batch_count)},
                             {"validation_accuracy", val_acc}}
                    .dump()
             << '\n';
      }

      if (!have_lr_best || val_acc > lr_best.validation_accuracy) {
        lr_best.adapter_state = adapter->state_to_json();
        lr_best.config = config;
        lr_best.validation_accuracy = val_acc;
        lr_best.epoch = epoch;
        lr_best.learning_rate = lr;
        have_lr_best = true;
      }
    }

    // Ties resolve toward the smaller rate.
    if (have_lr_best &&
        (!have_best || lr_best.validation_accuracy > best.validation_accuracy ||
         (lr_best.validation_accuracy == best.validation_accuracy &&
          lr_best.learning_rate < best.learning_rate))) {
      best = std::move(lr_best);
      have_best = true;
    }
  }

  if (!have_best) throw std::runtime_error("training produced no checkpoint");
  if (log) {
    *log << ordered_json{{"event", "selected"},
                         {"learning_rate", best.learning_rate},
                         {"epoch", best.epoch},
                         {"validation_accuracy", best.validation_accuracy}}
                .dump()
         << '\n';
  }
  return best;
}

void save_run(const Checkpoint& checkpoint, const std::filesystem::path& dir,
              const std::string& metrics_jsonl) {
  std::filesystem::create_directories(dir);
  checkpoint.save(dir / "checkpoint.json");
  {
    std::ofstream out(dir / "metrics.jsonl");
    if (!out) throw std::runtime_error("cannot write metrics in " + dir.string());
    out << metrics_jsonl;
  }
  ordered_json manifest;
  std::string config_dump = checkpoint.config.to_json().dump();
  char hash_buf[20];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_dump)));
  manifest["config_hash"] = hash_buf;
  manifest["trait"] = std::string(trait_code(checkpoint.config.trait));
  manifest["ablation"] = std::string(ablation_name(checkpoint.config.ablation));
  manifest["validation_accuracy"] = checkpoint.validation_accuracy;
  manifest["epoch"] = checkpoint.epoch;
  manifest["learning_rate"] = checkpoint.learning_rate;
  auto now = std::chrono::system_clock::now();
  manifest["created_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

}  // namespace prc
