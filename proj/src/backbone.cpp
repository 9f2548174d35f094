#include "prc/backbone.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "prc/text.hpp"

namespace prc {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view family_name(ModelFamily f) {
  switch (f) {
    case ModelFamily::mask_filling: return "mask_filling";
    case ModelFamily::seq2seq: return "seq2seq";
    case ModelFamily::causal: return "causal";
  }
  return "mask_filling";
}

ModelFamily parse_family(std::string_view name) {
  if (name == "mask_filling") return ModelFamily::mask_filling;
  if (name == "seq2seq") return ModelFamily::seq2seq;
  if (name == "causal") return ModelFamily::causal;
  throw std::invalid_argument("unknown model family: " + std::string(name));
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string join_lines(std::span<const std::string> lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out += '\n';
    out += lines[i];
  }
  return out;
}

std::size_t whitespace_token_count(const std::string& text) {
  return count_words(text);
}

std::string clip_tokens(const std::string& text, int max_tokens) {
  if (max_tokens <= 0) return text;
  std::size_t count = 0;
  bool in_word = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    bool space = std::isspace(static_cast<unsigned char>(text[i])) != 0;
    if (!space && !in_word) {
      ++count;
      if (count > static_cast<std::size_t>(max_tokens)) {
        std::size_t end = i;
        while (end > 0 && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
        return text.substr(0, end);
      }
    }
    in_word = !space;
  }
  return text;
}

}  // namespace

std::size_t prompt_token_count(const NliPrompt& prompt) {
  return whitespace_token_count(prompt.serialize());
}

NliPrompt apply_budget(const NliPrompt& prompt, const PromptBudget& budget) {
  std::vector<std::string> lines = split_lines(prompt.premise);
  for (std::string& line : lines) line = clip_tokens(line, budget.utterance_max_len);
  if (budget.dialogue_max_len > 0 &&
      lines.size() > static_cast<std::size_t>(budget.dialogue_max_len)) {
    lines.erase(lines.begin(),
                lines.end() - static_cast<long>(budget.dialogue_max_len));
  }

  NliPrompt out{join_lines(lines), prompt.hypothesis};
  if (budget.max_input_tokens > 0) {
    std::size_t drop = 0;
    while (drop < lines.size() &&
           prompt_token_count(out) > static_cast<std::size_t>(budget.max_input_tokens)) {
      ++drop;
      out.premise = join_lines(std::span(lines).subspan(drop));
    }
  }
  return out;
}

std::string realize_model_input(const NliPrompt& prompt, ModelFamily family) {
  std::string serialized = prompt.serialize();
  switch (family) {
    case ModelFamily::mask_filling:
      return serialized;
    case ModelFamily::seq2seq: {
      std::size_t pos = serialized.rfind(kMaskMarker);
      serialized.replace(pos, kMaskMarker.size(), "<extra_id_0>");
      return serialized;
    }
    case ModelFamily::causal: {
      // Score the next token after the question; the mask tail goes away.
      std::size_t pos = serialized.rfind(kMaskMarker);
      serialized.erase(pos);
      while (!serialized.empty() && serialized.back() == ' ') serialized.pop_back();
      return serialized;
    }
  }
  return serialized;
}

VerbalizerPair BackboneAdapter::verbalizer_probs(const NliPrompt& prompt) {
  VerbalizerPair pair = score_prompt(apply_budget(prompt, budget_));
  bool in_unit = pair.yes >= 0.0 && pair.yes <= 1.0 && pair.no >= 0.0 && pair.no <= 1.0;
  if (!in_unit || pair.yes + pair.no > 1.0 + 1e-12) {
    throw std::domain_error("adapter " + name() + " returned invalid verbalizer masses");
  }
  return pair;
}

ConstantAdapter::ConstantAdapter(double p_yes, double p_no, PromptBudget budget)
    : BackboneAdapter(budget), pair_{p_yes, p_no} {}

FixedTableAdapter::FixedTableAdapter(PromptBudget budget) : BackboneAdapter(budget) {}

void FixedTableAdapter::add(const NliPrompt& prompt, VerbalizerPair pair) {
  add_serialized(apply_budget(prompt, budget_).serialize(), pair);
}

void FixedTableAdapter::add_serialized(std::string serialized, VerbalizerPair pair) {
  table_[std::move(serialized)] = pair;
}

void FixedTableAdapter::set_default(VerbalizerPair pair) {
  has_default_ = true;
  default_pair_ = pair;
}

VerbalizerPair FixedTableAdapter::score_prompt(const NliPrompt& truncated) {
  auto it = table_.find(truncated.serialize());
  if (it != table_.end()) return it->second;
  if (has_default_) return default_pair_;
  throw std::runtime_error("recorded adapter has no entry for the prompt");
}

FixedTableAdapter FixedTableAdapter::from_file(const std::filesystem::path& path,
                                               PromptBudget budget) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open recorded scores: " + path.string());
  json j = json::parse(in);
  FixedTableAdapter adapter(budget);
  for (const json& entry : j.at("entries")) {
    adapter.add_serialized(entry.at("prompt").get<std::string>(),
                           {entry.at("p_yes").get<double>(), entry.at("p_no").get<double>()});
  }
  if (j.contains("default")) {
    adapter.set_default({j["default"].at("p_yes").get<double>(),
                         j["default"].at("p_no").get<double>()});
  }
  return adapter;
}

void FixedTableAdapter::save(const std::filesystem::path& path) const {
  ordered_json j;
  ordered_json entries = ordered_json::array();
  for (const auto& [prompt, pair] : table_) {
    entries.push_back({{"prompt", prompt}, {"p_yes", pair.yes}, {"p_no", pair.no}});
  }
  j["entries"] = std::move(entries);
  if (has_default_) j["default"] = {{"p_yes", default_pair_.yes}, {"p_no", default_pair_.no}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write recorded scores: " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace prc
