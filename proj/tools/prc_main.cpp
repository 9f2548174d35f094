#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "prc/eval.hpp"
#include "prc/session.hpp"
#include "prc/synthetic.hpp"
#include "prc/text.hpp"
#include "prc/trainer.hpp"

using namespace prc;
namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kAnnotatorHelp =
    "annotator id: lexicon | lexicon:<file.json> | trained:<model.json> | cache:<name@version>";

std::unique_ptr<ErcAnnotator> make_annotator(const std::string& id,
                                             const std::optional<fs::path>& cache_dir) {
  if (id == "lexicon") {
    return std::make_unique<LexiconAnnotator>(LexiconAnnotator::with_default_lexicon());
  }
  if (id.starts_with("lexicon:")) {
    return std::make_unique<LexiconAnnotator>(LexiconAnnotator::from_file(id.substr(8)));
  }
  if (id.starts_with("trained:")) {
    return TrainedErcAnnotator::load(id.substr(8));
  }
  if (id.starts_with("cache:")) {
    if (!cache_dir) throw CLI::ValidationError("--cache-dir is required for cache: annotators");
    return std::make_unique<FixedAnnotator>(
        FixedAnnotator::from_cache_dir(*cache_dir, id.substr(6)));
  }
  throw CLI::ValidationError("unknown annotator '" + id + "'. Registered forms: " +
                             kAnnotatorHelp);
}

std::vector<Dialogue> load_dialogues_or_die(const fs::path& path) {
  LoadResult result = load_dataset(path);
  for (const RecordDiagnostic& d : result.rejected) {
    std::cerr << "rejected record at " << d.to_string() << "\n";
  }
  if (result.dialogues.empty()) {
    throw std::runtime_error("no valid dialogues in " + path.string());
  }
  return std::move(result.dialogues);
}

std::map<Trait, Checkpoint> load_checkpoints(const fs::path& runs_dir) {
  std::map<Trait, Checkpoint> checkpoints;
  if (!fs::is_directory(runs_dir)) {
    throw std::runtime_error("runs directory not found: " + runs_dir.string());
  }
  for (const auto& entry : fs::recursive_directory_iterator(runs_dir)) {
    if (entry.path().filename() != "checkpoint.json") continue;
    Checkpoint c = Checkpoint::load(entry.path());
    checkpoints[c.config.trait] = std::move(c);
  }
  for (Trait t : kAllTraits) {
    if (!checkpoints.contains(t)) {
      throw std::runtime_error("missing trait run for " + std::string(trait_code(t)) + " under " +
                               runs_dir.string());
    }
  }
  return checkpoints;
}

TraitModels recorded_models(const fs::path& scores_path) {
  auto adapter = std::make_shared<FixedTableAdapter>(FixedTableAdapter::from_file(scores_path));
  TraitModels models;
  for (Trait t : kAllTraits) {
    RunConfig config;
    config.trait = t;
    models[t] = {adapter, config};
  }
  return models;
}

int cmd_stats(const fs::path& data, const std::optional<fs::path>& out) {
  auto dialogues = load_dialogues_or_die(data);
  StatsReport report = compute_stats(dialogues);
  std::string text = report.to_json_string();
  if (out) {
    std::ofstream file(*out);
    file << text << '\n';
    std::cout << "stats written to " << *out << "\n";
  } else {
    std::cout << text << "\n";
  }
  return 0;
}

int cmd_split(const fs::path& data, const fs::path& out_dir, std::uint64_t seed) {
  auto dialogues = load_dialogues_or_die(data);
  DatasetSplit split = split_dataset(dialogues, seed);
  save_split(split, out_dir, seed);
  std::cout << "split " << dialogues.size() << " dialogues into " << split.train.size() << "/"
            << split.validation.size() << "/" << split.test.size() << " under " << out_dir
            << "\n";
  return 0;
}

int cmd_synth(const fs::path& out_dir, std::size_t count, std::uint64_t seed) {
  SyntheticConfig config;
  config.dialogue_count = count;
  config.seed = seed;
  SyntheticCorpus corpus = generate_synthetic_corpus(config);

  fs::create_directories(out_dir);
  save_dataset(out_dir / "corpus.jsonl", corpus.dialogues);
  AnnotationCache cache(out_dir / "cache");
  corpus.fill_cache(cache);

  ordered_json run;
  run["trait"] = "NEU";
  run["ablation"] = "full";
  run["epochs"] = 40;
  run["learning_rate_grid"] = {1e-3, 3e-3};
  run["seed"] = 1;
  run["adapter"] = {{"hash_dim", 8192}, {"hidden_dim", 16}};
  run["dataset"] = {{"path", (out_dir / "corpus.jsonl").string()}, {"split_seed", 1}};
  run["annotator"] = "cache:oracle@1";
  run["cache_dir"] = (out_dir / "cache").string();
  run["out_dir"] = (out_dir / "runs" / "neu-full").string();
  std::ofstream cfg(out_dir / "quickstart_config.json");
  cfg << run.dump(2) << '\n';

  std::cout << "synthetic corpus: " << corpus.dialogues.size() << " dialogues under " << out_dir
            << "\nquickstart: prc train --config " << (out_dir / "quickstart_config.json")
            << "\n";
  return 0;
}

int cmd_annotate(const fs::path& data, const std::string& annotator_id, const fs::path& cache_dir) {
  auto dialogues = load_dialogues_or_die(data);
  auto annotator = make_annotator(annotator_id, cache_dir);
  AnnotationCache cache(cache_dir);

  std::size_t hits = 0;
  std::map<EmotionLabel, std::size_t> histogram;
  for (const Dialogue& d : dialogues) {
    if (cache.get(annotator->id(), d.dialogue_id)) ++hits;
    for (EmotionLabel e : annotate_dialogue(*annotator, d, &cache)) ++histogram[e];
  }
  std::cout << "annotated " << dialogues.size() << " dialogues with " << annotator->id() << " ("
            << (dialogues.size() - hits) << " new, " << hits << " cached)\n";
  for (const auto& [emotion, n] : histogram) {
    std::cout << "  " << emotion_name(emotion) << ": " << n << "\n";
  }
  std::cout << "cache entries: " << cache.entry_count(annotator->id()) << " under " << cache_dir
            << "\n";
  return 0;
}

int cmd_erc_train(const fs::path& corpus_path, const fs::path& out, const ErcTrainConfig& config) {
  auto corpus = load_erc_corpus(corpus_path);
  ErcTrainResult result = train_erc(config, corpus);
  result.annotator->save(out);
  std::cout << "trained " << result.annotator->id() << " on " << corpus.size()
            << " dialogues; validation accuracy " << result.validation_accuracy << "\n"
            << "model written to " << out << "\n";
  return 0;
}

struct TrainFileConfig {
  RunConfig run;
  fs::path dataset_path;
  std::optional<std::uint64_t> split_seed;
  std::optional<fs::path> split_dir;
  std::string annotator_id = "lexicon";
  std::optional<fs::path> cache_dir;
  fs::path out_dir;
};

TrainFileConfig parse_train_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  json j = json::parse(in);
  TrainFileConfig config;
  config.run = RunConfig::from_json(j);
  if (j.contains("dataset")) {
    const json& ds = j["dataset"];
    if (ds.contains("split_dir")) {
      config.split_dir = fs::path(ds["split_dir"].get<std::string>());
    } else {
      if (!ds.contains("path")) {
        throw std::invalid_argument("run config field 'dataset.path': missing");
      }
      config.dataset_path = ds["path"].get<std::string>();
      config.split_seed = ds.value("split_seed", config.run.seed);
    }
  } else {
    throw std::invalid_argument("run config field 'dataset': missing");
  }
  config.annotator_id = j.value("annotator", config.annotator_id);
  if (j.contains("cache_dir")) config.cache_dir = fs::path(j["cache_dir"].get<std::string>());
  config.out_dir = j.value("out_dir", std::string("run"));
  return config;
}

int cmd_train(const fs::path& config_path, const std::optional<fs::path>& out_override,
              const std::optional<fs::path>& descriptions_override,
              const std::optional<fs::path>& templates_override) {
  TrainFileConfig config = parse_train_config(config_path);
  if (out_override) config.out_dir = *out_override;
  if (descriptions_override) config.run.descriptions_path = descriptions_override;
  if (templates_override) config.run.templates_path = templates_override;

  DatasetSplit split;
  if (config.split_dir) {
    split = load_split(*config.split_dir);
  } else {
    auto dialogues = load_dialogues_or_die(config.dataset_path);
    split = split_dataset(dialogues, *config.split_seed);
  }

  auto annotator = make_annotator(config.annotator_id, config.cache_dir);
  std::optional<AnnotationCache> cache;
  if (config.cache_dir) cache.emplace(*config.cache_dir);

  std::ostringstream log;
  Checkpoint checkpoint = train_trait_model(config.run, split, *annotator,
                                            tiny_adapter_factory(),
                                            cache ? &*cache : nullptr, &log);
  save_run(checkpoint, config.out_dir, log.str());
  std::cout << "run " << trait_code(checkpoint.config.trait) << "/"
            << ablation_name(checkpoint.config.ablation) << ": best validation accuracy "
            << checkpoint.validation_accuracy << " (lr " << checkpoint.learning_rate << ", epoch "
            << checkpoint.epoch << ")\nrun directory: " << config.out_dir << "\n";
  return 0;
}

int cmd_eval(const fs::path& runs_dir, const fs::path& data, const std::string& annotator_id,
             const std::optional<fs::path>& cache_dir, const fs::path& out_stem, bool flow,
             const std::vector<double>& fractions) {
  auto checkpoints = load_checkpoints(runs_dir);
  TraitModels models = models_from_checkpoints(checkpoints);
  auto dialogues = load_dialogues_or_die(data);
  auto annotator = make_annotator(annotator_id, cache_dir);
  std::optional<AnnotationCache> cache;
  if (cache_dir) cache.emplace(*cache_dir);

  EvalReport report;
  if (flow) {
    report = evaluate_flow(models, dialogues, *annotator, fractions, cache ? &*cache : nullptr);
  } else {
    report = evaluate_overall(models, dialogues, *annotator, cache ? &*cache : nullptr);
  }
  write_report(report, out_stem);
  std::cout << "task " << report.task << " over " << report.dialogue_count
            << " dialogues: average accuracy " << format_fixed(report.average, 3) << "\n"
            << "report files: " << out_stem << ".{json,csv,txt}\n";
  return 0;
}

int cmd_session(const std::optional<fs::path>& runs_dir, const std::optional<fs::path>& scores,
                const std::string& annotator_id, const std::optional<fs::path>& cache_dir,
                const std::string& target, double delta,
                const std::vector<std::string>& speakers,
                const std::optional<fs::path>& events_path) {
  TraitModels models;
  if (scores) {
    models = recorded_models(*scores);
  } else if (runs_dir) {
    models = models_from_checkpoints(load_checkpoints(*runs_dir));
  } else {
    throw CLI::ValidationError("session needs --runs-dir or --scores");
  }
  auto annotator = make_annotator(annotator_id, cache_dir);

  SessionConfig config;
  config.target_speaker = target;
  config.delta = delta;
  config.registered_speakers = speakers;
  SessionState state(std::move(models), *annotator, config);

  std::ofstream events_file;
  std::ostream* events = &std::cerr;
  if (events_path) {
    events_file.open(*events_path);
    if (!events_file) {
      throw std::runtime_error("cannot open events file: " + events_path->string());
    }
    events = &events_file;
  }
  run_session(std::cin, std::cout, *events, state);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Big-Five personality recognition from dialog via emotion-aware entailment "
               "prompting"};
  app.require_subcommand(1);

  fs::path stats_data;
  std::optional<fs::path> stats_out;
  auto* stats = app.add_subcommand("stats", "Dataset statistics report");
  stats->add_option("--data", stats_data, "dialog JSONL file")->required();
  stats->add_option("--out", stats_out, "write JSON report here instead of stdout");

  fs::path split_data, split_out{"split"};
  std::uint64_t split_seed = 1;
  auto* split = app.add_subcommand("split", "Deterministic 8:1:1 dataset split");
  split->add_option("--data", split_data, "dialog JSONL file")->required();
  split->add_option("--out-dir", split_out, "output directory");
  split->add_option("--seed", split_seed, "shuffle seed recorded in the manifest");

  fs::path synth_out{"synthetic"};
  std::size_t synth_count = 500;
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand(
      "synth", "Generate the synthetic emotion-labeled corpus and a quickstart train config");
  synth->add_option("--out-dir", synth_out, "output directory");
  synth->add_option("--count", synth_count, "number of dialogues");
  synth->add_option("--seed", synth_seed, "generator seed");

  fs::path ann_data, ann_cache{"cache"};
  std::string ann_id = "lexicon";
  auto* annotate = app.add_subcommand("annotate", "Populate the offline annotation cache");
  annotate->add_option("--data", ann_data, "dialog JSONL file")->required();
  annotate->add_option("--annotator", ann_id, kAnnotatorHelp);
  annotate->add_option("--cache-dir", ann_cache, "annotation cache directory");

  fs::path erc_corpus, erc_out{"erc_model.json"};
  ErcTrainConfig erc_config;
  auto* erc = app.add_subcommand("erc-train", "Train the utterance emotion classifier");
  erc->add_option("--corpus", erc_corpus, "emotion-labeled dialog JSONL")->required();
  erc->add_option("--out", erc_out, "model output path");
  erc->add_option("--epochs", erc_config.epochs, "training epochs");
  erc->add_option("--lr", erc_config.learning_rate, "learning rate");
  erc->add_option("--seed", erc_config.seed, "shuffle/init seed");
  erc->add_option("--hash-dim", erc_config.hash_dim, "hashed feature dimension");

  fs::path train_config;
  std::optional<fs::path> train_out, train_desc, train_templates;
  auto* train = app.add_subcommand("train", "Fine-tune one trait model from a run config");
  train->add_option("--config", train_config, "run config JSON")->required();
  train->add_option("--out-dir", train_out, "override the config's run directory");
  train->add_option("--descriptions", train_desc,
                    "trait description file override (description ablations)");
  train->add_option("--templates", train_templates, "affective template file override");

  fs::path eval_runs, eval_data, eval_out{"report"};
  std::string eval_ann = "lexicon";
  std::optional<fs::path> eval_cache;
  auto* eval_cmd = app.add_subcommand("eval", "Overall evaluation over a test set");
  eval_cmd->add_option("--runs-dir", eval_runs, "directory holding the five trait runs")
      ->required();
  eval_cmd->add_option("--data", eval_data, "test JSONL file")->required();
  eval_cmd->add_option("--annotator", eval_ann, kAnnotatorHelp);
  eval_cmd->add_option("--cache-dir", eval_cache, "annotation cache directory");
  eval_cmd->add_option("--out", eval_out, "report stem (writes .json/.csv/.txt)");

  fs::path flow_runs, flow_data, flow_out{"flow_report"};
  std::string flow_ann = "lexicon";
  std::optional<fs::path> flow_cache;
  std::vector<double> flow_fractions = {0.25, 0.5, 0.75, 1.0};
  auto* flow_cmd = app.add_subcommand("flow", "Prefix-based evaluation at dialog fractions");
  flow_cmd->add_option("--runs-dir", flow_runs, "directory holding the five trait runs")
      ->required();
  flow_cmd->add_option("--data", flow_data, "test JSONL file")->required();
  flow_cmd->add_option("--annotator", flow_ann, kAnnotatorHelp);
  flow_cmd->add_option("--cache-dir", flow_cache, "annotation cache directory");
  flow_cmd->add_option("--out", flow_out, "report stem (writes .json/.csv/.txt)");
  flow_cmd->add_option("--fractions", flow_fractions, "prefix fractions to evaluate");

  std::optional<fs::path> sess_runs, sess_scores, sess_events, sess_cache;
  std::string sess_ann = "lexicon", sess_target;
  double sess_delta = 0.6;
  std::vector<std::string> sess_speakers;
  auto* session = app.add_subcommand(
      "session", "Interactive streaming recognition; reads \"name: text\" turns from stdin");
  session->add_option("--runs-dir", sess_runs, "directory holding the five trait runs");
  session->add_option("--scores", sess_scores, "recorded-scores JSON (instead of runs)");
  session->add_option("--annotator", sess_ann, kAnnotatorHelp);
  session->add_option("--cache-dir", sess_cache, "annotation cache directory");
  session->add_option("--target", sess_target, "analyzed speaker name")->required();
  session->add_option("--delta", sess_delta, "trigger threshold in (0,1)");
  session->add_option("--speakers", sess_speakers, "pre-registered speaker names");
  session->add_option("--events", sess_events, "trigger event JSONL path (default stderr)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*stats) return cmd_stats(stats_data, stats_out);
    if (*split) return cmd_split(split_data, split_out, split_seed);
    if (*synth) return cmd_synth(synth_out, synth_count, synth_seed);
    if (*annotate) return cmd_annotate(ann_data, ann_id, ann_cache);
    if (*erc) return cmd_erc_train(erc_corpus, erc_out, erc_config);
    if (*train) return cmd_train(train_config, train_out, train_desc, train_templates);
    if (*eval_cmd) {
      return cmd_eval(eval_runs, eval_data, eval_ann, eval_cache, eval_out, false, {});
    }
    if (*flow_cmd) {
      return cmd_eval(flow_runs, flow_data, flow_ann, flow_cache, flow_out, true, flow_fractions);
    }
    if (*session) {
      return cmd_session(sess_runs, sess_scores, sess_ann, sess_cache, sess_target, sess_delta,
                         sess_speakers, sess_events);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
