#include "prc/hypotheses.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace prc {

namespace {

std::size_t polarity_index(Polarity p) { return p == Polarity::positive ? 0 : 1; }

}  // namespace

DescriptionRegistry DescriptionRegistry::standard() {
  DescriptionRegistry r;
  auto set = [&](Trait t, std::string pos, std::string neg) {
    r.texts_[trait_index(t)][0] = std::move(pos);
    r.texts_[trait_index(t)][1] = std::move(neg);
  };
  set(Trait::AGR,
      "friendly, cooperative, empathetic, and compassionate, often prioritizing harmonious "
      "relationships and the well-being of others.",
      "confrontational, uncooperative, lacking empathy, and often prioritizing their own needs "
      "and desires over the well-being of others.");
  set(Trait::CON,
      "organized, responsible, diligent, detail-oriented, and committed to achieving their goals "
      "with a strong sense of duty and self-discipline.",
      "disorganized, careless, impulsive, lacking discipline, and often displaying a disregard "
      "for responsibilities and commitments.");
  set(Trait::EXT,
      "outgoing, sociable, energetic, and thriving in social interactions, often seeking "
      "stimulation and enjoying the company of others.",
      "introverted, reserved, quiet, and often preferring solitude or smaller social settings, "
      "conserving energy and finding fulfillment in introspection and reflection.");
  set(Trait::OPN,
      "has curiosity, open-mindedness, creativity, tolerance, emotional expressiveness, and "
      "willingness to embrace new experiences and ideas.",
      "closed-minded, resistant to change, lacking curiosity, intolerant of differences, "
      "emotionally guarded, and hesitant to explore new ideas or experiences.");
  set(Trait::NEU,
      "prone to experiencing negative emotions, such as anxiety, worry, and mood swings, often "
      "displaying heightened sensitivity to stress and a tendency towards self-doubt and "
      "emotional instability.",
      "emotionally stable, resilient, and composed, often displaying a calm and balanced "
      "demeanor, and having a tendency to handle stress and adversity with ease.");
  return r;
}

DescriptionRegistry DescriptionRegistry::label_names() {
  DescriptionRegistry r;
  for (Trait t : kAllTraits) {
    r.texts_[trait_index(t)][0] = std::string(trait_name(t));
    r.texts_[trait_index(t)][1] = "not " + std::string(trait_name(t));
  }
  return r;
}

DescriptionRegistry DescriptionRegistry::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open description file: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  DescriptionRegistry r;
  for (Trait t : kAllTraits) {
    const nlohmann::json& entry = j.at(std::string(trait_code(t)));
    r.texts_[trait_index(t)][0] = entry.at("positive").get<std::string>();
    r.texts_[trait_index(t)][1] = entry.at("negative").get<std::string>();
  }
  return r;
}

void DescriptionRegistry::save(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  for (Trait t : kAllTraits) {
    j[std::string(trait_code(t))] = {{"positive", texts_[trait_index(t)][0]},
                                     {"negative", texts_[trait_index(t)][1]}};
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write description file: " + path.string());
  out << j.dump(2) << '\n';
}

TraitDescription DescriptionRegistry::get(Trait trait, Polarity polarity) const {
  return {trait, polarity, texts_[trait_index(trait)][polarity_index(polarity)]};
}

std::string DescriptionRegistry::render_hypothesis(const std::string& speaker, Trait trait,
                                                   Polarity polarity) const {
  if (speaker.empty()) throw std::invalid_argument("speaker must be non-empty");
  std::string text = speaker + " is " + get(trait, polarity).text;
  while (!text.empty() && (text.back() == ' ' || text.back() == '.')) text.pop_back();
  text.push_back('.');
  return text;
}

}  // namespace prc
