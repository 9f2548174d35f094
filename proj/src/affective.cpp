#include "prc/affective.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace prc {

namespace {

std::string substitute(std::string templ, const std::string& speaker, EmotionLabel emotion) {
  auto replace_all = [&](const std::string& placeholder, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = templ.find(placeholder, pos)) != std::string::npos) {
      templ.replace(pos, placeholder.size(), value);
      pos += value.size();
    }
  };
  replace_all("{speaker}", speaker);
  replace_all("{emotion}", std::string(emotion_name(emotion)));
  return templ;
}

}  // namespace

AffectiveTemplates AffectiveTemplates::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template file: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  AffectiveTemplates t;
  t.first_target = j.at("first_target").get<std::string>();
  t.first_other = j.at("first_other").get<std::string>();
  t.later_target = j.at("later_target").get<std::string>();
  t.later_other = j.at("later_other").get<std::string>();
  return t;
}

AffectiveDialogue build_affective_content(const Dialogue& dialogue,
                                          const std::vector<EmotionLabel>& emotions,
                                          const AffectiveTemplates& templates) {
  if (emotions.size() != dialogue.utterances.size()) {
    throw std::invalid_argument("emotion count " + std::to_string(emotions.size()) +
                                " does not match utterance count " +
                                std::to_string(dialogue.utterances.size()));
  }

  auto speakers = dialogue.distinct_speakers();
  std::string other_name = "the others";
  if (speakers.size() == 2) {
    other_name = speakers[0] == dialogue.target_speaker ? speakers[1] : speakers[0];
  }

  AffectiveDialogue ad;
  ad.dialogue_id = dialogue.dialogue_id;
  ad.target_speaker = dialogue.target_speaker;
  ad.items.reserve(dialogue.utterances.size());
  for (std::size_t i = 0; i < dialogue.utterances.size(); ++i) {
    const Utterance& u = dialogue.utterances[i];
    const bool first = i == 0;
    const std::string& templ = first ? (u.is_target ? templates.first_target : templates.first_other)
                                     : (u.is_target ? templates.later_target : templates.later_other);
    const std::string& name = u.is_target ? dialogue.target_speaker : other_name;
    ad.items.push_back({u, emotions[i], substitute(templ, name, emotions[i])});
  }
  return ad;
}

std::string render_affective_text(const AffectiveDialogue& ad) {
  std::string out;
  for (std::size_t i = 0; i < ad.items.size(); ++i) {
    const AffectiveUtterance& item = ad.items[i];
    if (i > 0) out += '\n';
    out += item.utterance.speaker_id;
    out += ": ";
    out += item.utterance.text;
    out += ' ';
    out += item.description;
  }
  return out;
}

std::string render_plain_text(const AffectiveDialogue& ad) {
  std::string out;
  for (std::size_t i = 0; i < ad.items.size(); ++i) {
    const AffectiveUtterance& item = ad.items[i];
    if (i > 0) out += '\n';
    out += item.utterance.speaker_id;
    out += ": ";
    out += item.utterance.text;
  }
  return out;
}

}  // namespace prc
