#include "prc/eval.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "prc/affective.hpp"
#include "prc/nli.hpp"
#include "prc/text.hpp"

namespace prc {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

TraitModels models_from_checkpoints(const std::map<Trait, Checkpoint>& checkpoints) {
  TraitModels models;
  for (const auto& [trait, checkpoint] : checkpoints) {
    models[trait] = {std::shared_ptr<BackboneAdapter>(checkpoint.instantiate()),
                     checkpoint.config};
  }
  return models;
}

namespace {

void require_all_traits(const TraitModels& models) {
  for (Trait t : kAllTraits) {
    if (!models.contains(t)) {
      throw std::invalid_argument("missing model for trait " + std::string(trait_code(t)));
    }
  }
}

std::array<double, kTraitCount> accuracies_on(const TraitModels& models,
                                              std::span<const Dialogue> dialogues,
                                              const ErcAnnotator& annotator,
                                              AnnotationCache* cache) {
  std::map<Trait, RunPipeline> pipelines;
  for (Trait t : kAllTraits) pipelines.emplace(t, RunPipeline::resolve(models.at(t).config));

  std::array<std::size_t, kTraitCount> correct{};
  for (const Dialogue& dialogue : dialogues) {
    for (Trait t : kAllTraits) {
      const RunPipeline& pipeline = pipelines.at(t);
      AffectiveDialogue ad = pipeline.wrap(dialogue, annotator, cache);
      TraitPrediction pred = pipeline.predict(ad, *models.at(t).adapter);
      correct[trait_index(t)] += pred.label == dialogue.labels[t] ? 1 : 0;
    }
  }
  std::array<double, kTraitCount> acc{};
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    acc[i] = static_cast<double>(correct[i]) / static_cast<double>(dialogues.size());
  }
  return acc;
}

double mean_of(const std::array<double, kTraitCount>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(kTraitCount);
}

}  // namespace

EvalReport evaluate_overall(const TraitModels& models, std::span<const Dialogue> test,
                            const ErcAnnotator& annotator, AnnotationCache* cache) {
  require_all_traits(models);
  if (test.empty()) throw std::invalid_argument("evaluate_overall: empty test set");

  EvalReport report;
  report.task = "overall";
  report.dialogue_count = test.size();
  report.annotator_id = annotator.id();
  report.per_trait = accuracies_on(models, test, annotator, cache);
  report.average = mean_of(report.per_trait);
  return report;
}

EvalReport evaluate_flow(const TraitModels& models, std::span<const Dialogue> test,
                         const ErcAnnotator& annotator, const std::vector<double>& fractions,
                         AnnotationCache* cache) {
  require_all_traits(models);
  if (test.empty()) throw std::invalid_argument("evaluate_flow: empty test set");

  EvalReport report;
  report.task = "flow";
  report.dialogue_count = test.size();
  report.annotator_id = annotator.id();

  for (double fraction : fractions) {
    FlowPoint point;
    point.fraction = fraction;

    std::vector<Dialogue> prefixes;
    prefixes.reserve(test.size());
    std::size_t raw_target_total = 0;
    for (const Dialogue& dialogue : test) {
      Dialogue prefix = flow_prefix(dialogue, fraction);
      raw_target_total += raw_prefix_target_count(dialogue, fraction);
      if (raw_prefix_target_count(dialogue, fraction) == 0) {
        ++point.extended_dialogues;
        point.extended_dialogue_ids.push_back(dialogue.dialogue_id);
      }
      prefixes.push_back(std::move(prefix));
    }
    point.mean_target_utterances =
        static_cast<double>(raw_target_total) / static_cast<double>(test.size());
    point.per_trait = accuracies_on(models, prefixes, annotator, cache);
    point.average = mean_of(point.per_trait);
    report.fractions.push_back(std::move(point));
  }

  if (!report.fractions.empty()) {
    // Headline accuracy of a flow report: its last (largest) fraction.
    report.per_trait = report.fractions.back().per_trait;
    report.average = report.fractions.back().average;
  }
  return report;
}

EvalReport aggregate_reports(std::span<const EvalReport> reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate_reports: no reports");
  EvalReport out = reports.front();
  out.seed_count = reports.size();
  if (reports.size() == 1) return out;

  for (std::size_t i = 0; i < kTraitCount; ++i) {
    double sum = 0.0;
    for (const EvalReport& r : reports) sum += r.per_trait[i];
    double mean = sum / static_cast<double>(reports.size());
    double sq = 0.0;
    for (const EvalReport& r : reports) sq += (r.per_trait[i] - mean) * (r.per_trait[i] - mean);
    out.per_trait[i] = mean;
    out.per_trait_std[i] = std::sqrt(sq / static_cast<double>(reports.size() - 1));
  }
  double sum = 0.0;
  for (const EvalReport& r : reports) sum += r.average;
  double mean = sum / static_cast<double>(reports.size());
  double sq = 0.0;
  for (const EvalReport& r : reports) sq += (r.average - mean) * (r.average - mean);
  out.average = mean;
  out.average_std = std::sqrt(sq / static_cast<double>(reports.size() - 1));
  out.fractions.clear();  // per-fraction aggregation is not reported
  return out;
}

std::string format_mean_std(double mean, double std_dev) {
  return format_fixed(mean, 3) + "±" + format_fixed(std_dev, 3);
}

ordered_json report_to_json(const EvalReport& report) {
  ordered_json j;
  j["task"] = report.task;
  j["dialogue_count"] = report.dialogue_count;
  j["annotator_id"] = report.annotator_id;
  ordered_json per_trait;
  for (Trait t : kAllTraits) {
    per_trait[std::string(trait_code(t))] = report.per_trait[trait_index(t)];
  }
  j["per_trait_accuracy"] = std::move(per_trait);
  j["average_accuracy"] = report.average;
  if (!report.fractions.empty()) {
    ordered_json fractions = ordered_json::array();
    for (const FlowPoint& p : report.fractions) {
      ordered_json pj;
      pj["fraction"] = p.fraction;
      ordered_json pt;
      for (Trait t : kAllTraits) pt[std::string(trait_code(t))] = p.per_trait[trait_index(t)];
      pj["per_trait_accuracy"] = std::move(pt);
      pj["average_accuracy"] = p.average;
      pj["mean_target_utterances"] = p.mean_target_utterances;
      pj["extended_dialogues"] = p.extended_dialogues;
      pj["extended_dialogue_ids"] = p.extended_dialogue_ids;
      fractions.push_back(std::move(pj));
    }
    j["fractions"] = std::move(fractions);
  }
  j["seed_count"] = report.seed_count;
  if (report.seed_count > 1) {
    ordered_json stds;
    for (Trait t : kAllTraits) {
      stds[std::string(trait_code(t))] = report.per_trait_std[trait_index(t)];
    }
    j["per_trait_std"] = std::move(stds);
    j["average_std"] = report.average_std;
  }
  return j;
}

EvalReport report_from_json(const json& j) {
  EvalReport report;
  report.task = j.at("task").get<std::string>();
  report.dialogue_count = j.at("dialogue_count").get<std::size_t>();
  report.annotator_id = j.at("annotator_id").get<std::string>();
  for (Trait t : kAllTraits) {
    report.per_trait[trait_index(t)] =
        j.at("per_trait_accuracy").at(std::string(trait_code(t))).get<double>();
  }
  report.average = j.at("average_accuracy").get<double>();
  if (j.contains("fractions")) {
    for (const json& pj : j["fractions"]) {
      FlowPoint p;
      p.fraction = pj.at("fraction").get<double>();
      for (Trait t : kAllTraits) {
        p.per_trait[trait_index(t)] =
            pj.at("per_trait_accuracy").at(std::string(trait_code(t))).get<double>();
      }
      p.average = pj.at("average_accuracy").get<double>();
      p.mean_target_utterances = pj.at("mean_target_utterances").get<double>();
      p.extended_dialogues = pj.at("extended_dialogues").get<std::size_t>();
      p.extended_dialogue_ids = pj.at("extended_dialogue_ids").get<std::vector<std::string>>();
      report.fractions.push_back(std::move(p));
    }
  }
  report.seed_count = j.value("seed_count", std::size_t{1});
  if (j.contains("per_trait_std")) {
    for (Trait t : kAllTraits) {
      report.per_trait_std[trait_index(t)] =
          j["per_trait_std"].at(std::string(trait_code(t))).get<double>();
    }
    report.average_std = j.value("average_std", 0.0);
  }
  return report;
}

namespace {

struct TableRow {
  std::string label;
  std::array<double, kTraitCount> per_trait{};
  double average = 0.0;
  std::array<double, kTraitCount> per_trait_std{};
  double average_std = 0.0;
  bool with_std = false;
};

std::vector<TableRow> table_rows(const EvalReport& report) {
  std::vector<TableRow> rows;
  if (report.task == "flow" && !report.fractions.empty()) {
    for (const FlowPoint& p : report.fractions) {
      TableRow row;
      row.label = "flow@" + format_fixed(p.fraction, 2);
      row.per_trait = p.per_trait;
      row.average = p.average;
      rows.push_back(std::move(row));
    }
  } else {
    TableRow row;
    row.label = report.task;
    row.per_trait = report.per_trait;
    row.average = report.average;
    if (report.seed_count > 1) {
      row.with_std = true;
      row.per_trait_std = report.per_trait_std;
      row.average_std = report.average_std;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string cell_text(const TableRow& row, std::size_t i) {
  if (row.with_std) return format_mean_std(row.per_trait[i], row.per_trait_std[i]);
  return format_fixed(row.per_trait[i], 3);
}

std::string avg_text(const TableRow& row) {
  if (row.with_std) return format_mean_std(row.average, row.average_std);
  return format_fixed(row.average, 3);
}

}  // namespace

void write_report(const EvalReport& report, const std::filesystem::path& stem) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());

  {
    auto path = stem;
    path += ".json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path.string());
    out << report_to_json(report).dump(2) << '\n';
  }

  const std::vector<TableRow> rows = table_rows(report);

  {
    auto path = stem;
    path += ".csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path.string());
    out << "row";
    for (Trait t : kAllTraits) out << ',' << trait_code(t);
    out << ",Avg\n";
    for (const TableRow& row : rows) {
      out << row.label;
      for (std::size_t i = 0; i < kTraitCount; ++i) out << ',' << cell_text(row, i);
      out << ',' << avg_text(row) << '\n';
    }
  }

  {
    auto path = stem;
    path += ".txt";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report: " + path.string());
    std::size_t label_width = 4;
    for (const TableRow& row : rows) label_width = std::max(label_width, row.label.size());
    std::size_t cell_width = 6;
    for (const TableRow& row : rows) {
      for (std::size_t i = 0; i < kTraitCount; ++i) {
        cell_width = std::max(cell_width, cell_text(row, i).size());
      }
      cell_width = std::max(cell_width, avg_text(row).size());
    }
    auto pad = [](const std::string& s, std::size_t width) {
      return s + std::string(width > s.size() ? width - s.size() : 0, ' ');
    };
    out << pad("", label_width);
    for (Trait t : kAllTraits) out << "  " << pad(std::string(trait_code(t)), cell_width);
    out << "  " << pad("Avg", cell_width) << '\n';
    for (const TableRow& row : rows) {
      out << pad(row.label, label_width);
      for (std::size_t i = 0; i < kTraitCount; ++i) out << "  " << pad(cell_text(row, i), cell_width);
      out << "  " << pad(avg_text(row), cell_width) << '\n';
    }
  }
}

}  // namespace prc
