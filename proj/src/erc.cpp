#include "prc/erc.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "prc/text.hpp"
#include <json.hpp>

namespace prc {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "Anger", "Disgust", "Fear", "Joy", "Sadness", "Surprise", "Neutral"};

std::string sanitize_for_path(const std::string& id) {
  std::string out;
  for (char c : id) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  char suffix[24];
  std::snprintf(suffix, sizeof(suffix), "-%08llx",
                static_cast<unsigned long long>(fnv1a64(id) & 0xffffffffULL));
  return out + suffix;
}

std::vector<EmotionLabel> labels_from_json(const json& arr) {
  std::vector<EmotionLabel> labels;
  for (const json& v : arr) labels.push_back(parse_emotion(v.get<std::string>()));
  return labels;
}

json labels_to_json(const std::vector<EmotionLabel>& labels) {
  json arr = json::array();
  for (EmotionLabel e : labels) arr.push_back(std::string(emotion_name(e)));
  return arr;
}

}  // namespace

std::string_view emotion_name(EmotionLabel e) {
  return kEmotionNames[static_cast<std::size_t>(e)];
}

EmotionLabel parse_emotion(std::string_view name) {
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (kEmotionNames[i] == name) return static_cast<EmotionLabel>(i);
  }
  throw std::invalid_argument("unknown emotion label: " + std::string(name));
}

bool is_negative_emotion(EmotionLabel e) {
  return e == EmotionLabel::Anger || e == EmotionLabel::Disgust || e == EmotionLabel::Fear ||
         e == EmotionLabel::Sadness;
}

AnnotationCache::AnnotationCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path AnnotationCache::entry_path(const std::string& annotator_id,
                                                  const std::string& dialogue_id) const {
  return dir_ / sanitize_for_path(annotator_id) / (sanitize_for_path(dialogue_id) + ".json");
}

std::optional<std::vector<EmotionLabel>> AnnotationCache::get(const std::string& annotator_id,
                                                              const std::string& dialogue_id) const {
  std::lock_guard lock(mutex_);
  const std::string key = annotator_id + "\x1f" + dialogue_id;
  if (auto it = memory_.find(key); it != memory_.end()) return it->second;

  std::ifstream in(entry_path(annotator_id, dialogue_id));
  if (!in) return std::nullopt;
  json entry = json::parse(in, nullptr, false);
  if (entry.is_discarded() || entry.value("annotator_id", "") != annotator_id ||
      entry.value("dialogue_id", "") != dialogue_id) {
    return std::nullopt;
  }
  auto labels = labels_from_json(entry.at("labels"));
  memory_[key] = labels;
  return labels;
}

void AnnotationCache::put(const std::string& annotator_id, const std::string& dialogue_id,
                          const std::vector<EmotionLabel>& labels) {
  std::lock_guard lock(mutex_);
  memory_[annotator_id + "\x1f" + dialogue_id] = labels;

  auto path = entry_path(annotator_id, dialogue_id);
  std::filesystem::create_directories(path.parent_path());
  ordered_json entry;
  entry["annotator_id"] = annotator_id;
  entry["dialogue_id"] = dialogue_id;
  entry["labels"] = labels_to_json(labels);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write cache entry: " + tmp.string());
    out << entry.dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::size_t AnnotationCache::entry_count(const std::string& annotator_id) const {
  std::lock_guard lock(mutex_);
  auto sub = dir_ / sanitize_for_path(annotator_id);
  if (!std::filesystem::is_directory(sub)) return 0;
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(sub)) {
    if (entry.path().extension() == ".json") ++n;
  }
  return n;
}

std::vector<EmotionLabel> annotate_dialogue(const ErcAnnotator& annotator,
                                            const Dialogue& dialogue, AnnotationCache* cache) {
  if (cache) {
    auto cached = cache->get(annotator.id(), dialogue.dialogue_id);
    // A mismatched length marks a stale entry; fall through and re-annotate.
    if (cached && cached->size() == dialogue.utterances.size()) return *cached;
  }
  std::vector<EmotionLabel> labels = annotator.annotate(dialogue);
  if (labels.size() != dialogue.utterances.size()) {
    throw std::runtime_error("annotator " + annotator.id() + " returned " +
                             std::to_string(labels.size()) + " labels for " +
                             std::to_string(dialogue.utterances.size()) + " utterances");
  }
  if (cache) cache->put(annotator.id(), dialogue.dialogue_id, labels);
  return labels;
}

LexiconAnnotator::LexiconAnnotator(std::map<std::string, EmotionLabel> lexicon, std::string name)
    : name_(std::move(name)) {
  if (lexicon.empty()) throw std::invalid_argument("lexicon must be non-empty");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [word, label] : lexicon) {
    lexicon_[to_lower(word)] = label;
  }
  for (const auto& [word, label] : lexicon_) {
    h = fnv1a64_mix(h, word);
    h = fnv1a64_mix(h, emotion_name(label));
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%08llx", static_cast<unsigned long long>(h & 0xffffffffULL));
  version_ = buf;
}

EmotionLabel LexiconAnnotator::label_text(const std::string& text) const {
  for (const std::string& word : tokenize(text)) {
    if (auto it = lexicon_.find(word); it != lexicon_.end()) return it->second;
  }
  return EmotionLabel::Neutral;
}

std::vector<EmotionLabel> LexiconAnnotator::annotate(const Dialogue& dialogue) const {
  std::vector<EmotionLabel> labels;
  labels.reserve(dialogue.utterances.size());
  for (const Utterance& u : dialogue.utterances) labels.push_back(label_text(u.text));
  return labels;
}

LexiconAnnotator LexiconAnnotator::with_default_lexicon() {
  static const std::map<std::string, EmotionLabel> kDefault = {
      {"good", EmotionLabel::Joy},        {"great", EmotionLabel::Joy},
      {"wonderful", EmotionLabel::Joy},   {"happy", EmotionLabel::Joy},
      {"glad", EmotionLabel::Joy},        {"fantastic", EmotionLabel::Joy},
      {"delighted", EmotionLabel::Joy},   {"love", EmotionLabel::Joy},
      {"lovely", EmotionLabel::Joy},      {"fun", EmotionLabel::Joy},
      {"angry", EmotionLabel::Anger},     {"furious", EmotionLabel::Anger},
      {"mad", EmotionLabel::Anger},       {"hate", EmotionLabel::Anger},
      {"annoyed", EmotionLabel::Anger},   {"outrageous", EmotionLabel::Anger},
      {"dreadful", EmotionLabel::Anger},  {"sad", EmotionLabel::Sadness},
      {"unhappy", EmotionLabel::Sadness}, {"miserable", EmotionLabel::Sadness},
      {"cry", EmotionLabel::Sadness},     {"crying", EmotionLabel::Sadness},
      {"lonely", EmotionLabel::Sadness},  {"heartbroken", EmotionLabel::Sadness},
      {"afraid", EmotionLabel::Fear},     {"scared", EmotionLabel::Fear},
      {"terrified", EmotionLabel::Fear},  {"frightened", EmotionLabel::Fear},
      {"worried", EmotionLabel::Fear},    {"anxious", EmotionLabel::Fear},
      {"disgusting", EmotionLabel::Disgust}, {"gross", EmotionLabel::Disgust},
      {"revolting", EmotionLabel::Disgust},  {"nasty", EmotionLabel::Disgust},
      {"wow", EmotionLabel::Surprise},    {"amazing", EmotionLabel::Surprise},
      {"unbelievable", EmotionLabel::Surprise}, {"astonishing", EmotionLabel::Surprise},
      {"incredible", EmotionLabel::Surprise},   {"surprised", EmotionLabel::Surprise},
  };
  return LexiconAnnotator(kDefault, "lexicon");
}

LexiconAnnotator LexiconAnnotator::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon file: " + path.string());
  json j = json::parse(in);
  std::map<std::string, EmotionLabel> lexicon;
  for (auto it = j.begin(); it != j.end(); ++it) {
    lexicon[it.key()] = parse_emotion(it.value().get<std::string>());
  }
  return LexiconAnnotator(std::move(lexicon), "lexicon-" + path.stem().string());
}

FixedAnnotator::FixedAnnotator(std::map<std::string, std::vector<EmotionLabel>> labels,
                               std::string name, std::string version)
    : labels_(std::move(labels)), name_(std::move(name)), version_(std::move(version)) {}

FixedAnnotator FixedAnnotator::from_cache_dir(const std::filesystem::path& dir,
                                              const std::string& annotator_id) {
  auto sub = dir / sanitize_for_path(annotator_id);
  if (!std::filesystem::is_directory(sub)) {
    throw std::runtime_error("no cached annotations for " + annotator_id + " under " +
                             dir.string());
  }
  std::map<std::string, std::vector<EmotionLabel>> labels;
  for (const auto& entry : std::filesystem::directory_iterator(sub)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    json j = json::parse(in);
    labels[j.at("dialogue_id").get<std::string>()] = labels_from_json(j.at("labels"));
  }
  auto at = annotator_id.find('@');
  std::string name = at == std::string::npos ? annotator_id : annotator_id.substr(0, at);
  std::string version = at == std::string::npos ? "1" : annotator_id.substr(at + 1);
  return FixedAnnotator(std::move(labels), std::move(name), std::move(version));
}

std::vector<EmotionLabel> FixedAnnotator::annotate(const Dialogue& dialogue) const {
  auto it = labels_.find(dialogue.dialogue_id);
  if (it == labels_.end()) {
    // flow_prefix ids wrap a known dialogue; serve the label prefix.
    std::size_t marker = dialogue.dialogue_id.rfind("#p");
    if (marker != std::string::npos) {
      it = labels_.find(dialogue.dialogue_id.substr(0, marker));
    }
    if (it == labels_.end()) {
      throw std::runtime_error("no fixed annotation for dialogue " + dialogue.dialogue_id);
    }
  }
  if (it->second.size() < dialogue.utterances.size()) {
    throw std::runtime_error("fixed annotation for " + dialogue.dialogue_id + " holds " +
                             std::to_string(it->second.size()) + " labels for " +
                             std::to_string(dialogue.utterances.size()) + " utterances");
  }
  return {it->second.begin(), it->second.begin() + static_cast<long>(dialogue.utterances.size())};
}

std::vector<ErcLabeledDialogue> load_erc_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ERC corpus: " + path.string());
  std::vector<ErcLabeledDialogue> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec = json::parse(line);
    ErcLabeledDialogue item;
    item.dialogue.dialogue_id = rec.at("dialogue_id").get<std::string>();
    item.dialogue.target_speaker = rec.at("target_speaker").get<std::string>();
    int index = 0;
    for (const json& u : rec.at("utterances")) {
      Utterance utt;
      utt.index = index++;
      utt.speaker_id = u.at("speaker").get<std::string>();
      utt.text = u.at("text").get<std::string>();
      utt.is_target = utt.speaker_id == item.dialogue.target_speaker;
      item.dialogue.utterances.push_back(std::move(utt));
      try {
        item.emotions.push_back(parse_emotion(u.at("emotion").get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    corpus.push_back(std::move(item));
  }
  if (corpus.empty()) throw std::runtime_error("empty ERC corpus: " + path.string());
  return corpus;
}

namespace {

// feature layout: [0, hash_dim) hashed ngrams, then is-target indicator, then bias
std::map<int, double> erc_features(const std::string& text, bool is_target, int hash_dim) {
  auto features = hashed_ngram_counts(tokenize(text), hash_dim);
  if (is_target) features[hash_dim] = 1.0;
  features[hash_dim + 1] = 1.0;
  return features;
}

}  // namespace

EmotionLabel TrainedErcAnnotator::classify(const std::string& text, bool is_target) const {
  auto features = erc_features(text, is_target, hash_dim_);
  const int cols = hash_dim_ + 2;
  double best = -1e300;
  int best_class = 0;
  for (int c = 0; c < static_cast<int>(kEmotionCount); ++c) {
    double logit = 0.0;
    for (const auto& [f, v] : features) logit += weights_[static_cast<std::size_t>(c * cols + f)] * v;
    if (logit > best) {
      best = logit;
      best_class = c;
    }
  }
  return static_cast<EmotionLabel>(best_class);
}

std::vector<EmotionLabel> TrainedErcAnnotator::annotate(const Dialogue& dialogue) const {
  std::vector<EmotionLabel> labels;
  labels.reserve(dialogue.utterances.size());
  for (const Utterance& u : dialogue.utterances) labels.push_back(classify(u.text, u.is_target));
  return labels;
}

void TrainedErcAnnotator::save(const std::filesystem::path& path) const {
  ordered_json j;
  j["type"] = "trained-erc";
  j["hash_dim"] = hash_dim_;
  j["weights"] = weights_;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ERC model: " + path.string());
  out << j.dump() << '\n';
}

std::unique_ptr<TrainedErcAnnotator> TrainedErcAnnotator::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ERC model: " + path.string());
  json j = json::parse(in);
  if (j.value("type", "") != "trained-erc") {
    throw std::runtime_error("not a trained-erc model file: " + path.string());
  }
  auto model = std::make_unique<TrainedErcAnnotator>();
  model->hash_dim_ = j.at("hash_dim").get<int>();
  model->weights_ = j.at("weights").get<std::vector<double>>();
  const std::size_t expected = kEmotionCount * static_cast<std::size_t>(model->hash_dim_ + 2);
  if (model->weights_.size() != expected) {
    throw std::runtime_error("ERC model weight size mismatch in " + path.string());
  }
  std::uint64_t h = fnv1a64_mix(0xcbf29ce484222325ULL,
                                std::string_view(reinterpret_cast<const char*>(model->weights_.data()),
                                                 model->weights_.size() * sizeof(double)));
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%08llx", static_cast<unsigned long long>(h & 0xffffffffULL));
  model->version_ = buf;
  return model;
}

struct ErcTrainer {
  static ErcTrainResult run(const ErcTrainConfig& config,
                            std::span<const ErcLabeledDialogue> corpus) {
    struct Sample {
      std::map<int, double> features;
      int gold;
    };
    std::vector<Sample> samples;
    for (const ErcLabeledDialogue& item : corpus) {
      if (item.emotions.size() != item.dialogue.utterances.size()) {
        throw std::invalid_argument("ERC corpus dialogue " + item.dialogue.dialogue_id +
                                    " has mismatched emotion count");
      }
      for (std::size_t i = 0; i < item.dialogue.utterances.size(); ++i) {
        const Utterance& u = item.dialogue.utterances[i];
        samples.push_back({erc_features(u.text, u.is_target, config.hash_dim),
                           static_cast<int>(item.emotions[i])});
      }
    }
    if (samples.empty()) throw std::invalid_argument("ERC corpus has no utterances");

    Rng rng(config.seed);
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    rng_shuffle(order, rng);
    std::size_t val_size = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(config.validation_fraction *
                                                 static_cast<double>(samples.size()))));
    if (val_size >= samples.size()) val_size = samples.size() / 2;
    std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<long>(val_size));
    std::vector<std::size_t> train(order.begin() + static_cast<long>(val_size), order.end());

    const int classes = static_cast<int>(kEmotionCount);
    const int cols = config.hash_dim + 2;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(classes, cols);
    Eigen::MatrixXd m1 = Eigen::MatrixXd::Zero(classes, cols);
    Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(classes, cols);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;

    auto logits_of = [&](const Sample& s) {
      Eigen::VectorXd z = Eigen::VectorXd::Zero(classes);
      for (const auto& [f, v] : s.features) z += w.col(f) * v;
      return z;
    };

    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(classes, cols);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      rng_shuffle(train, rng);
      for (std::size_t start = 0; start < train.size();
           start += static_cast<std::size_t>(config.batch_size)) {
        std::size_t end = std::min(train.size(), start + static_cast<std::size_t>(config.batch_size));
        grad.setZero();
        for (std::size_t i = start; i < end; ++i) {
          const Sample& s = samples[train[i]];
          Eigen::VectorXd z = logits_of(s);
          Eigen::VectorXd p = (z.array() - z.maxCoeff()).exp().matrix();
          p /= p.sum();
          p[s.gold] -= 1.0;
          for (const auto& [f, v] : s.features) grad.col(f) += p * v;
        }
        grad /= static_cast<double>(end - start);
        ++step;
        m1 = beta1 * m1 + (1.0 - beta1) * grad;
        m2 = beta2 * m2 + (1.0 - beta2) * grad.cwiseProduct(grad);
        double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        w.array() -= config.learning_rate * (m1.array() / c1) /
                     ((m2.array() / c2).sqrt() + eps);
      }
    }

    auto result = std::make_unique<TrainedErcAnnotator>();
    result->hash_dim_ = config.hash_dim;
    result->weights_.resize(static_cast<std::size_t>(classes) * static_cast<std::size_t>(cols));
    for (int c = 0; c < classes; ++c) {
      for (int f = 0; f < cols; ++f) {
        result->weights_[static_cast<std::size_t>(c * cols + f)] = w(c, f);
      }
    }
    std::uint64_t h = fnv1a64_mix(
        0xcbf29ce484222325ULL,
        std::string_view(reinterpret_cast<const char*>(result->weights_.data()),
                         result->weights_.size() * sizeof(double)));
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%08llx", static_cast<unsigned long long>(h & 0xffffffffULL));
    result->version_ = buf;

    std::size_t correct = 0;
    for (std::size_t i : val) {
      const Sample& s = samples[i];
      Eigen::VectorXd z = Eigen::VectorXd::Zero(classes);
      for (const auto& [f, v] : s.features) {
        for (int c = 0; c < classes; ++c) {
          z[c] += result->weights_[static_cast<std::size_t>(c * cols + f)] * v;
        }
      }
      int best = 0;
      z.maxCoeff(&best);
      correct += best == s.gold ? 1 : 0;
    }
    double val_acc = static_cast<double>(correct) / static_cast<double>(val.size());
    return {std::move(result), val_acc};
  }
};

ErcTrainResult train_erc(const ErcTrainConfig& config,
                         std::span<const ErcLabeledDialogue> corpus) {
  return ErcTrainer::run(config, corpus);
}

}  // namespace prc
