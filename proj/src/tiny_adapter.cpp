#include "prc/tiny_adapter.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "prc/text.hpp"

namespace prc {

using nlohmann::json;

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp().matrix();
  return p / p.sum();
}

double renorm_ce_loss_from_logits(const Eigen::VectorXd& logits, Answer gold) {
  Eigen::VectorXd p = softmax(logits);
  double mass = p[kYesIndex] + p[kNoIndex];
  double q = (gold == Answer::yes ? p[kYesIndex] : p[kNoIndex]) / mass;
  return -std::log(q);
}

Eigen::VectorXd renorm_ce_grad_from_logits(const Eigen::VectorXd& logits, Answer gold) {
  // dL/dz_k = q_k - 1[k == gold], with q the softmax renormalized over
  // the yes/no entries and zero elsewhere.
  Eigen::VectorXd p = softmax(logits);
  double mass = p[kYesIndex] + p[kNoIndex];
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(logits.size());
  grad[kYesIndex] = p[kYesIndex] / mass;
  grad[kNoIndex] = p[kNoIndex] / mass;
  grad[gold == Answer::yes ? kYesIndex : kNoIndex] -= 1.0;
  return grad;
}

json TinyAdapterConfig::to_json() const {
  return json{{"hash_dim", hash_dim},
              {"hidden_dim", hidden_dim},
              {"init_scale", init_scale},
              {"init_seed", init_seed},
              {"learning_rate", learning_rate},
              {"adam_beta1", adam_beta1},
              {"adam_beta2", adam_beta2},
              {"adam_epsilon", adam_epsilon},
              {"weight_decay", weight_decay},
              {"family", std::string(family_name(family))},
              {"utterance_max_len", budget.utterance_max_len},
              {"dialogue_max_len", budget.dialogue_max_len},
              {"max_input_tokens", budget.max_input_tokens},
              {"head_only", head_only}};
}

TinyAdapterConfig TinyAdapterConfig::from_json(const json& j) {
  TinyAdapterConfig c;
  c.hash_dim = j.value("hash_dim", c.hash_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.init_scale = j.value("init_scale", c.init_scale);
  c.init_seed = j.value("init_seed", c.init_seed);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.family = parse_family(j.value("family", std::string(family_name(c.family))));
  c.budget.utterance_max_len = j.value("utterance_max_len", c.budget.utterance_max_len);
  c.budget.dialogue_max_len = j.value("dialogue_max_len", c.budget.dialogue_max_len);
  c.budget.max_input_tokens = j.value("max_input_tokens", c.budget.max_input_tokens);
  c.head_only = j.value("head_only", c.head_only);
  return c;
}

struct TinyTextAdapter::Features {
  std::map<int, double> values;  // sparse over [0, 2 * hash_dim)
};

TinyTextAdapter::TinyTextAdapter(TinyAdapterConfig config)
    : TrainableAdapter(config.budget), config_(config) {
  if (config_.hash_dim <= 0 || config_.hidden_dim <= 0) {
    throw std::invalid_argument("tiny adapter needs positive hash_dim and hidden_dim");
  }
  reset_parameters(config_.init_seed);
}

void TinyTextAdapter::reset_parameters(std::uint64_t seed) {
  config_.init_seed = seed;
  const int in_dim = 2 * config_.hash_dim;
  Rng rng(seed);
  auto init_matrix = [&](Eigen::MatrixXd& m, int rows, int cols) {
    m.resize(rows, cols);
    for (int c = 0; c < cols; ++c) {
      for (int r = 0; r < rows; ++r) m(r, c) = rng_normal(rng) * config_.init_scale;
    }
  };
  init_matrix(w1_, config_.hidden_dim, in_dim);
  init_matrix(w2_, kVerbalizerVocab, config_.hidden_dim);
  b1_ = Eigen::VectorXd::Zero(config_.hidden_dim);
  b2_ = Eigen::VectorXd::Zero(kVerbalizerVocab);

  m1_w1_ = Eigen::MatrixXd::Zero(w1_.rows(), w1_.cols());
  m2_w1_ = m1_w1_;
  m1_w2_ = Eigen::MatrixXd::Zero(w2_.rows(), w2_.cols());
  m2_w2_ = m1_w2_;
  m1_b1_ = Eigen::VectorXd::Zero(b1_.size());
  m2_b1_ = m1_b1_;
  m1_b2_ = Eigen::VectorXd::Zero(b2_.size());
  m2_b2_ = m1_b2_;
  adam_step_ = 0;
}

TinyTextAdapter::Features TinyTextAdapter::featurize(const NliPrompt& prompt) const {
  Features f;
  for (const auto& [bucket, v] : hashed_ngram_counts(tokenize(prompt.premise), config_.hash_dim)) {
    f.values[bucket] += v;
  }
  std::string tail = prompt.hypothesis + " " + std::string(kNliQuestion);
  for (const auto& [bucket, v] : hashed_ngram_counts(tokenize(tail), config_.hash_dim)) {
    f.values[config_.hash_dim + bucket] += v;
  }
  return f;
}

Eigen::VectorXd TinyTextAdapter::logits(const NliPrompt& prompt) const {
  Features f = featurize(apply_budget(prompt, budget_));
  Eigen::VectorXd pre = b1_;
  for (const auto& [idx, v] : f.values) pre += w1_.col(idx) * v;
  return w2_ * pre.array().tanh().matrix() + b2_;
}

VerbalizerPair TinyTextAdapter::score_prompt(const NliPrompt& truncated) {
  Features f = featurize(truncated);
  Eigen::VectorXd pre = b1_;
  for (const auto& [idx, v] : f.values) pre += w1_.col(idx) * v;
  Eigen::VectorXd p = softmax(w2_ * pre.array().tanh().matrix() + b2_);
  return {p[kYesIndex], p[kNoIndex]};
}

double TinyTextAdapter::fit_step(std::span<const NliSample> batch) {
  if (!is_training()) throw std::logic_error("fit_step on an adapter in evaluation mode");
  if (batch.empty()) throw std::invalid_argument("fit_step needs a non-empty batch");

  Eigen::MatrixXd g_w1 = Eigen::MatrixXd::Zero(w1_.rows(), w1_.cols());
  Eigen::VectorXd g_b1 = Eigen::VectorXd::Zero(b1_.size());
  Eigen::MatrixXd g_w2 = Eigen::MatrixXd::Zero(w2_.rows(), w2_.cols());
  Eigen::VectorXd g_b2 = Eigen::VectorXd::Zero(b2_.size());

  double loss_sum = 0.0;
  for (const NliSample& sample : batch) {
    Features f = featurize(apply_budget(sample.prompt, budget_));
    Eigen::VectorXd pre = b1_;
    for (const auto& [idx, v] : f.values) pre += w1_.col(idx) * v;
    Eigen::VectorXd h = pre.array().tanh().matrix();
    Eigen::VectorXd z = w2_ * h + b2_;

    loss_sum += renorm_ce_loss_from_logits(z, sample.gold);
    Eigen::VectorXd dz = renorm_ce_grad_from_logits(z, sample.gold);

    g_b2 += dz;
    g_w2 += dz * h.transpose();
    Eigen::VectorXd dh = w2_.transpose() * dz;
    Eigen::VectorXd dpre = (dh.array() * (1.0 - h.array().square())).matrix();
    g_b1 += dpre;
    for (const auto& [idx, v] : f.values) g_w1.col(idx) += dpre * v;
  }

  const double scale = 1.0 / static_cast<double>(batch.size());
  double mean_loss = loss_sum * scale;
  if (!std::isfinite(mean_loss)) {
    throw std::runtime_error("non-finite training loss in fit_step");
  }

  ++adam_step_;
  const double c1 = 1.0 - std::pow(config_.adam_beta1, static_cast<double>(adam_step_));
  const double c2 = 1.0 - std::pow(config_.adam_beta2, static_cast<double>(adam_step_));
  auto update = [&](auto& param, auto& grad, auto& m1, auto& m2) {
    grad *= scale;
    m1 = config_.adam_beta1 * m1 + (1.0 - config_.adam_beta1) * grad;
    m2 = config_.adam_beta2 * m2 + (1.0 - config_.adam_beta2) * grad.cwiseProduct(grad);
    param.array() -= config_.learning_rate * (m1.array() / c1) /
                     ((m2.array() / c2).sqrt() + config_.adam_epsilon);
  };
  update(w2_, g_w2, m1_w2_, m2_w2_);
  update(b2_, g_b2, m1_b2_, m2_b2_);
  if (!config_.head_only) {
    update(w1_, g_w1, m1_w1_, m2_w1_);
    update(b1_, g_b1, m1_b1_, m2_b1_);
  }
  if (config_.weight_decay > 0.0) {
    const double keep = 1.0 - config_.learning_rate * config_.weight_decay;
    w2_ *= keep;
    if (!config_.head_only) w1_ *= keep;
  }
  return mean_loss;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<double> data(m.data(), m.data() + m.size());
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  auto rows = j.at("rows").get<Eigen::Index>();
  auto cols = j.at("cols").get<Eigen::Index>();
  auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw std::runtime_error("matrix payload size mismatch");
  }
  Eigen::MatrixXd m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

}  // namespace

json TinyTextAdapter::state_to_json() const {
  json state;
  state["type"] = "tiny";
  state["config"] = config_.to_json();
  state["verbalizer"] = {{"yes", kYesIndex}, {"no", kNoIndex}};
  state["w1"] = matrix_to_json(w1_);
  state["b1"] = vector_to_json(b1_);
  state["w2"] = matrix_to_json(w2_);
  state["b2"] = vector_to_json(b2_);
  return state;
}

void TinyTextAdapter::load_state(const json& state) {
  if (state.value("type", "") != "tiny") throw std::runtime_error("not a tiny adapter state");
  config_ = TinyAdapterConfig::from_json(state.at("config"));
  budget_ = config_.budget;
  w1_ = matrix_from_json(state.at("w1"));
  b1_ = vector_from_json(state.at("b1"));
  w2_ = matrix_from_json(state.at("w2"));
  b2_ = vector_from_json(state.at("b2"));
  if (w1_.rows() != config_.hidden_dim || w1_.cols() != 2 * config_.hash_dim ||
      w2_.rows() != kVerbalizerVocab || w2_.cols() != config_.hidden_dim) {
    throw std::runtime_error("tiny adapter state has inconsistent shapes");
  }
  m1_w1_ = Eigen::MatrixXd::Zero(w1_.rows(), w1_.cols());
  m2_w1_ = m1_w1_;
  m1_w2_ = Eigen::MatrixXd::Zero(w2_.rows(), w2_.cols());
  m2_w2_ = m1_w2_;
  m1_b1_ = Eigen::VectorXd::Zero(b1_.size());
  m2_b1_ = m1_b1_;
  m1_b2_ = Eigen::VectorXd::Zero(b2_.size());
  m2_b2_ = m1_b2_;
  adam_step_ = 0;
}

std::unique_ptr<TinyTextAdapter> make_tiny_adapter(const TinyAdapterConfig& config) {
  return std::make_unique<TinyTextAdapter>(config);
}

std::unique_ptr<TinyTextAdapter> tiny_adapter_from_state(const json& state) {
  auto adapter = std::make_unique<TinyTextAdapter>(
      TinyAdapterConfig::from_json(state.at("config")));
  adapter->load_state(state);
  return adapter;
}

std::unique_ptr<BackboneAdapter> make_adapter_from_spec(const std::string& spec,
                                                        PromptBudget budget) {
  std::string id = spec;
  std::string arg;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    id = spec.substr(0, colon);
    arg = spec.substr(colon + 1);
  }
  if (id == "tiny") {
    TinyAdapterConfig config;
    config.budget = budget;
    if (!arg.empty()) config.family = parse_family(arg);
    return make_tiny_adapter(config);
  }
  if (id == "constant") {
    auto comma = arg.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("constant adapter needs \"constant:<p_yes>,<p_no>\"");
    }
    return std::make_unique<ConstantAdapter>(std::stod(arg.substr(0, comma)),
                                             std::stod(arg.substr(comma + 1)), budget);
  }
  if (id == "recorded") {
    if (arg.empty()) throw std::invalid_argument("recorded adapter needs a scores file path");
    return std::make_unique<FixedTableAdapter>(FixedTableAdapter::from_file(arg, budget));
  }
  if (id == "checkpoint") {
    if (arg.empty()) throw std::invalid_argument("checkpoint adapter needs a state file path");
    std::ifstream in(arg);
    if (!in) throw std::runtime_error("cannot open adapter state: " + arg);
    return tiny_adapter_from_state(json::parse(in));
  }
  throw std::invalid_argument("unknown adapter spec '" + spec +
                              "'; known: tiny[:family], constant:<p_yes>,<p_no>, "
                              "recorded:<file>, checkpoint:<file>");
}

}  // namespace prc
