#include "numsarc/neural.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "numsarc/error.hpp"
#include "numsarc/fingerprint.hpp"

namespace numsarc::neural {

using autodiff::Parameter;
using autodiff::Tape;
using autodiff::Var;

namespace {

constexpr int kFormatVersion = 1;

std::vector<double> as_vector(const Tensor& t) { return t.data; }

struct LstmVars {
  Var W_i, W_f, W_C, W_o, b_i, b_f, b_C, b_o;
};

// One step of the LSTM transition over [h_prev, x].
void lstm_graph_step(const LstmVars& w, Var x, Var& h, Var& c) {
  const Var z = autodiff::concat({h, x});
  const Var i = autodiff::sigmoid(autodiff::add(autodiff::matvec(w.W_i, z), w.b_i));
  const Var f = autodiff::sigmoid(autodiff::add(autodiff::matvec(w.W_f, z), w.b_f));
  const Var o = autodiff::sigmoid(autodiff::add(autodiff::matvec(w.W_o, z), w.b_o));
  const Var candidate = autodiff::tanh(autodiff::add(autodiff::matvec(w.W_C, z), w.b_C));
  c = autodiff::add(autodiff::hadamard(f, c), autodiff::hadamard(i, candidate));
  h = autodiff::hadamard(o, autodiff::tanh(c));
}

Tensor glorot(std::size_t rows, std::size_t cols, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t(rows, cols);
  for (auto& v : t.data) v = rng.uniform(-limit, limit);
  return t;
}

}  // namespace

// ---- Vocabulary

Vocabulary::Vocabulary() {
  add("<pad>");
  add("<unk>");
}

void Vocabulary::add(const std::string& word) {
  if (index_.contains(word)) return;
  index_.emplace(word, words_.size());
  words_.push_back(word);
}

Vocabulary Vocabulary::from_sentences(const std::vector<std::vector<std::string>>& sentences, std::size_t min_count) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& s : sentences) {
    for (const auto& w : s) ++counts[w];
  }
  Vocabulary v;
  for (const auto& s : sentences) {
    for (const auto& w : s) {
      if (counts[w] >= min_count) v.add(w);
    }
  }
  return v;
}

Vocabulary Vocabulary::from_words(const std::vector<std::string>& words) {
  if (words.size() < 2 || words[0] != "<pad>" || words[1] != "<unk>") {
    throw DataError("vocabulary must start with <pad> and <unk>");
  }
  Vocabulary v;
  for (std::size_t i = 2; i < words.size(); ++i) {
    if (v.index_.contains(words[i])) throw DataError("duplicate vocabulary word '" + words[i] + "'");
    v.add(words[i]);
  }
  return v;
}

std::size_t Vocabulary::index_of(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnkIndex : it->second;
}

std::string Vocabulary::fingerprint() const {
  Fingerprint fp;
  for (const auto& w : words_) fp.add(std::string_view(w));
  return fp.hex();
}

PaddedTweet pad_and_index(const std::vector<std::string>& tokens, const Vocabulary& vocab, std::size_t length) {
  PaddedTweet out;
  out.indices.assign(length, kPadIndex);
  for (std::size_t i = 0; i < std::min(length, tokens.size()); ++i) out.indices[i] = vocab.index_of(tokens[i]);
  return out;
}

// ---- Standalone ops

std::vector<double> conv_feature_map(const Tensor& input, const ConvFilter& filter, Activation func) {
  if (filter.weights.rows != filter.width || filter.weights.cols != input.cols) {
    throw UsageError("filter shape does not match width " + std::to_string(filter.width) + " and d=" +
                     std::to_string(input.cols));
  }
  if (filter.width == 0 || filter.width > input.rows) {
    throw UsageError("filter width " + std::to_string(filter.width) + " exceeds sequence length " +
                     std::to_string(input.rows));
  }
  Tape tape;
  Tensor w(1, filter.width * input.cols);
  w.data = filter.weights.data;
  const Var map = autodiff::conv1d(tape.constant(input), tape.constant(std::move(w)),
                                   tape.constant(Tensor::column({filter.bias})), filter.width);
  return as_vector(autodiff::activate(map, func).value());
}

double max_over_time_pool(std::span<const double> map) {
  if (map.empty()) throw UsageError("max-over-time pooling of an empty map");
  Tape tape;
  return autodiff::max_over_time(tape.constant(Tensor::column({map.begin(), map.end()}))).value().data[0];
}

LstmCell LstmCell::zeros(std::size_t hidden, std::size_t input) {
  LstmCell c;
  c.hidden = hidden;
  c.input = input;
  c.W_i = c.W_f = c.W_C = c.W_o = Tensor(hidden, hidden + input);
  c.b_i = c.b_f = c.b_C = c.b_o = std::vector<double>(hidden, 0.0);
  return c;
}

LstmState lstm_step(const LstmCell& cell, std::span<const double> x, const LstmState& state) {
  const std::size_t H = cell.hidden;
  if (x.size() != cell.input || state.h.size() != H || state.C.size() != H) {
    throw UsageError("lstm_step dimension mismatch: input " + std::to_string(x.size()) + " (expected " +
                     std::to_string(cell.input) + "), state " + std::to_string(state.h.size()) + "/" +
                     std::to_string(state.C.size()) + " (expected " + std::to_string(H) + ")");
  }
  for (const auto* W : {&cell.W_i, &cell.W_f, &cell.W_C, &cell.W_o}) {
    if (W->rows != H || W->cols != H + cell.input) throw UsageError("lstm_step gate weight shape mismatch");
  }
  for (const auto* b : {&cell.b_i, &cell.b_f, &cell.b_C, &cell.b_o}) {
    if (b->size() != H) throw UsageError("lstm_step gate bias shape mismatch");
  }
  Tape tape;
  const LstmVars w{tape.constant(cell.W_i),           tape.constant(cell.W_f),           tape.constant(cell.W_C),
                   tape.constant(cell.W_o),           tape.constant(Tensor::column(cell.b_i)), tape.constant(Tensor::column(cell.b_f)),
                   tape.constant(Tensor::column(cell.b_C)), tape.constant(Tensor::column(cell.b_o))};
  Var h = tape.constant(Tensor::column(state.h));
  Var c = tape.constant(Tensor::column(state.C));
  lstm_graph_step(w, tape.constant(Tensor::column({x.begin(), x.end()})), h, c);
  return {h.value().data, c.value().data};
}

// ---- Configs

std::string architecture_name(Architecture a) {
  switch (a) {
    case Architecture::CnnFf: return "cnn-ff";
    case Architecture::LstmFf: return "lstm-ff";
    case Architecture::CnnLstmFf: return "cnn-lstm-ff";
  }
  return "cnn-ff";
}

Architecture parse_architecture(const std::string& name) {
  if (name == "cnn-ff") return Architecture::CnnFf;
  if (name == "lstm-ff") return Architecture::LstmFf;
  if (name == "cnn-lstm-ff") return Architecture::CnnLstmFf;
  throw UsageError("unknown neural architecture '" + name + "' (expected cnn-ff, lstm-ff or cnn-lstm-ff)");
}

std::string optimizer_name(Optimizer o) { return o == Optimizer::Sgd ? "sgd" : "adagrad"; }

Optimizer parse_optimizer(const std::string& name) {
  if (name == "sgd") return Optimizer::Sgd;
  if (name == "adagrad") return Optimizer::Adagrad;
  throw UsageError("unknown optimizer '" + name + "' (expected sgd or adagrad)");
}

ModelConfig ModelConfig::preset(Architecture a) {
  ModelConfig c;
  c.architecture = a;
  if (a == Architecture::CnnLstmFf) c.hidden = 64;
  return c;
}

void ModelConfig::validate() const {
  if (sequence_length == 0 || embedding_dim == 0) throw UsageError("sequence length and embedding dim must be positive");
  switch (architecture) {
    case Architecture::CnnFf:
      if (filter_widths.empty() || filters_per_width == 0) throw UsageError("cnn-ff needs filter widths and filters");
      for (auto k : filter_widths) {
        if (k == 0 || k > sequence_length) {
          throw UsageError("filter width " + std::to_string(k) + " must be in [1, " + std::to_string(sequence_length) + "]");
        }
      }
      break;
    case Architecture::LstmFf:
      if (hidden == 0) throw UsageError("lstm hidden size must be positive");
      break;
    case Architecture::CnnLstmFf: {
      if (hidden == 0 || cnn_lstm_filters == 0 || pool_size == 0) throw UsageError("cnn-lstm-ff sizes must be positive");
      if (cnn_lstm_width == 0 || cnn_lstm_width > sequence_length) throw UsageError("cnn-lstm-ff filter width out of range");
      const std::size_t conv = sequence_length - cnn_lstm_width + 1;
      if (conv % pool_size != 0) {
        throw UsageError("conv length " + std::to_string(conv) + " is not divisible by pool size " +
                         std::to_string(pool_size));
      }
      break;
    }
  }
}

nlohmann::json ModelConfig::to_json() const {
  return {{"architecture", architecture_name(architecture)},
          {"sequence_length", sequence_length},
          {"embedding_dim", embedding_dim},
          {"filter_widths", filter_widths},
          {"filters_per_width", filters_per_width},
          {"hidden", hidden},
          {"cnn_lstm_filters", cnn_lstm_filters},
          {"cnn_lstm_width", cnn_lstm_width},
          {"pool_size", pool_size},
          {"func", autodiff::activation_name(func)},
          {"train_embeddings", train_embeddings}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c = preset(parse_architecture(j.value("architecture", std::string("cnn-ff"))));
  c.sequence_length = j.value("sequence_length", c.sequence_length);
  c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
  c.filter_widths = j.value("filter_widths", c.filter_widths);
  c.filters_per_width = j.value("filters_per_width", c.filters_per_width);
  c.hidden = j.value("hidden", c.hidden);
  c.cnn_lstm_filters = j.value("cnn_lstm_filters", c.cnn_lstm_filters);
  c.cnn_lstm_width = j.value("cnn_lstm_width", c.cnn_lstm_width);
  c.pool_size = j.value("pool_size", c.pool_size);
  c.func = autodiff::parse_activation(j.value("func", std::string("tanh")));
  c.train_embeddings = j.value("train_embeddings", c.train_embeddings);
  return c;
}

TrainingConfig TrainingConfig::preset(Architecture a) {
  TrainingConfig t;
  if (a != Architecture::CnnFf) {
    t.optimizer = Optimizer::Adagrad;
    t.learning_rate = 0.3;
    t.dropout = 0.25;
  }
  return t;
}

void TrainingConfig::validate() const {
  if (batch_size == 0) throw UsageError("batch size must be at least 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw UsageError("dropout must be in [0, 1)");
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be positive");
  if (epochs == 0) throw UsageError("epochs must be at least 1");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) throw UsageError("validation fraction must be in [0, 1)");
}

nlohmann::json TrainingConfig::to_json() const {
  return {{"batch_size", batch_size},
          {"optimizer", optimizer_name(optimizer)},
          {"learning_rate", learning_rate},
          {"dropout", dropout},
          {"epochs", epochs},
          {"seed", seed},
          {"validation_fraction", validation_fraction},
          {"patience", patience}};
}

TrainingConfig TrainingConfig::from_json(const nlohmann::json& j) {
  TrainingConfig t;
  t.batch_size = j.value("batch_size", t.batch_size);
  t.optimizer = parse_optimizer(j.value("optimizer", optimizer_name(t.optimizer)));
  t.learning_rate = j.value("learning_rate", t.learning_rate);
  t.dropout = j.value("dropout", t.dropout);
  t.epochs = j.value("epochs", t.epochs);
  t.seed = j.value("seed", t.seed);
  t.validation_fraction = j.value("validation_fraction", t.validation_fraction);
  t.patience = j.value("patience", t.patience);
  return t;
}

// ---- Model

Model::Model(ModelConfig config, Vocabulary vocab, std::uint64_t seed, const embeddings::EmbeddingTable* pretrained)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  config_.validate();
  if (pretrained != nullptr && pretrained->dim() != config_.embedding_dim) {
    throw UsageError("pretrained embedding dimension " + std::to_string(pretrained->dim()) + " != model d=" +
                     std::to_string(config_.embedding_dim));
  }
  Rng rng(seed);
  const std::size_t d = config_.embedding_dim;
  const auto add = [&](std::string name, Tensor value, bool freeze = false) {
    param_index_[name] = params_.size();
    params_.emplace_back(std::move(name), std::move(value), freeze);
  };

  Tensor E(vocab_.size(), d);
  for (std::size_t r = 1; r < vocab_.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) E(r, c) = rng.uniform(-0.05, 0.05);
    if (pretrained != nullptr && r >= 2) {
      const auto row = pretrained->find(vocab_.words()[r]);
      if (!row.empty()) std::copy(row.begin(), row.end(), &E.data[r * d]);
    }
  }
  add("embedding", std::move(E), true);

  const auto add_lstm = [&](std::size_t input) {
    const std::size_t H = config_.hidden;
    for (const char* gate : {"i", "f", "C", "o"}) {
      add(std::string("lstm.W_") + gate, glorot(H, H + input, H + input, H, rng));
    }
    for (const char* gate : {"i", "f", "C", "o"}) {
      add(std::string("lstm.b_") + gate, Tensor(H, 1, std::string(gate) == "f" ? 1.0 : 0.0));
    }
  };

  switch (config_.architecture) {
    case Architecture::CnnFf:
      for (auto k : config_.filter_widths) {
        const auto n = config_.filters_per_width;
        add("conv" + std::to_string(k) + ".W", glorot(n, k * d, k * d, n, rng));
        add("conv" + std::to_string(k) + ".b", Tensor(n, 1));
      }
      break;
    case Architecture::LstmFf:
      add_lstm(d);
      break;
    case Architecture::CnnLstmFf: {
      const auto n = config_.cnn_lstm_filters, k = config_.cnn_lstm_width;
      add("conv.W", glorot(n, k * d, k * d, n, rng));
      add("conv.b", Tensor(n, 1));
      add_lstm(n);
      break;
    }
  }
  const std::size_t F = feature_length();
  add("out.W", glorot(1, F, F, 1, rng));
  add("out.b", Tensor(1, 1));
}

Parameter& Model::parameter(const std::string& name) {
  const auto it = param_index_.find(name);
  if (it == param_index_.end()) throw UsageError("model has no parameter '" + name + "'");
  return params_[it->second];
}

std::size_t Model::feature_length() const {
  switch (config_.architecture) {
    case Architecture::CnnFf: return config_.filter_widths.size() * config_.filters_per_width;
    case Architecture::LstmFf:
    case Architecture::CnnLstmFf: return config_.hidden;
  }
  return 0;
}

void Model::check_tweet(const PaddedTweet& tweet) const {
  if (tweet.indices.size() != config_.sequence_length) {
    throw UsageError("padded tweet has length " + std::to_string(tweet.indices.size()) + ", model expects " +
                     std::to_string(config_.sequence_length));
  }
  for (auto i : tweet.indices) {
    if (i >= vocab_.size()) throw UsageError("token index " + std::to_string(i) + " outside the vocabulary");
  }
}

Var Model::forward(Tape& tape, const PaddedTweet& tweet, double dropout, Rng* rng) {
  check_tweet(tweet);
  const auto P = [&](const std::string& name) { return tape.param(parameter(name)); };
  const auto lstm_vars = [&] {
    return LstmVars{P("lstm.W_i"), P("lstm.W_f"), P("lstm.W_C"), P("lstm.W_o"),
                    P("lstm.b_i"), P("lstm.b_f"), P("lstm.b_C"), P("lstm.b_o")};
  };
  const auto zeros = [&] { return tape.constant(Tensor(config_.hidden, 1)); };

  const Var I = autodiff::embed(tape, parameter("embedding"), tweet.indices);
  Var feature;
  switch (config_.architecture) {
    case Architecture::CnnFf: {
      std::vector<Var> pooled;
      for (auto k : config_.filter_widths) {
        const auto name = "conv" + std::to_string(k);
        const Var map = autodiff::activate(autodiff::conv1d(I, P(name + ".W"), P(name + ".b"), k), config_.func);
        pooled.push_back(autodiff::max_over_time(map));
      }
      feature = autodiff::concat(pooled);
      break;
    }
    case Architecture::LstmFf: {
      const auto w = lstm_vars();
      Var h = zeros(), c = zeros();
      std::vector<Var> outputs;
      for (std::size_t t = 0; t < config_.sequence_length; ++t) {
        lstm_graph_step(w, autodiff::row(I, t), h, c);
        outputs.push_back(h);
      }
      feature = autodiff::mean(outputs);
      break;
    }
    case Architecture::CnnLstmFf: {
      const Var map =
          autodiff::activate(autodiff::conv1d(I, P("conv.W"), P("conv.b"), config_.cnn_lstm_width), config_.func);
      const Var C = autodiff::max_pool_rows(map, config_.pool_size);
      const auto w = lstm_vars();
      Var h = zeros(), c = zeros();
      for (std::size_t j = 0; j < C.value().rows; ++j) lstm_graph_step(w, autodiff::row(C, j), h, c);
      feature = h;
      break;
    }
  }
  if (rng != nullptr && dropout > 0.0) {
    Tensor m(feature.value().rows, 1);
    const double keep = 1.0 / (1.0 - dropout);
    for (auto& v : m.data) v = rng->uniform() < dropout ? 0.0 : keep;
    feature = autodiff::mask(feature, std::move(m));
  }
  return autodiff::sigmoid(autodiff::add(autodiff::matvec(P("out.W"), feature), P("out.b")));
}

double Model::predict_proba(const PaddedTweet& tweet) {
  Tape tape;
  return forward(tape, tweet).value().data[0];
}

int Model::predict(const PaddedTweet& tweet) { return predict_proba(tweet) > 0.5 ? 1 : 0; }

std::string Model::fingerprint() const {
  Fingerprint fp;
  fp.add(std::string_view(config_.to_json().dump()));
  fp.add(std::string_view(vocab_.fingerprint()));
  for (const auto& p : params_) {
    fp.add(std::string_view(p.name));
    fp.add(std::span<const double>(p.value.data));
  }
  return fp.hex();
}

nlohmann::json Model::to_json() const {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& p : params_) {
    tensors.push_back({{"name", p.name}, {"shape", {p.value.rows, p.value.cols}}, {"data", p.value.data}});
  }
  return {{"kind", "neural"},
          {"version", kFormatVersion},
          {"config", config_.to_json()},
          {"vocabulary", vocab_.words()},
          {"vocabulary_hash", vocab_.fingerprint()},
          {"fingerprint", fingerprint()},
          {"tensors", std::move(tensors)}};
}

Model Model::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("kind", "") != "neural") throw DataError("expected a neural model checkpoint");
  if (j.value("version", 0) != kFormatVersion) throw DataError("unsupported neural checkpoint version");
  auto vocab = Vocabulary::from_words(j.at("vocabulary").get<std::vector<std::string>>());
  if (j.contains("vocabulary_hash") && j.at("vocabulary_hash").get<std::string>() != vocab.fingerprint()) {
    throw DataError("neural checkpoint vocabulary hash mismatch");
  }
  Model m(ModelConfig::from_json(j.at("config")), std::move(vocab), 0);
  const auto& tensors = j.at("tensors");
  if (tensors.size() != m.params_.size()) throw DataError("neural checkpoint has the wrong number of tensors");
  for (const auto& t : tensors) {
    auto& p = m.parameter(t.at("name").get<std::string>());
    const auto shape = t.at("shape").get<std::vector<std::size_t>>();
    auto data = t.at("data").get<std::vector<double>>();
    if (shape.size() != 2 || shape[0] != p.value.rows || shape[1] != p.value.cols || data.size() != p.value.size()) {
      throw DataError("neural checkpoint tensor '" + p.name + "' has the wrong shape");
    }
    p.value.data = std::move(data);
  }
  return m;
}

// ---- Loss, training, gradient check

double bce_loss(std::span<const double> y_hat, std::span<const int> y) {
  if (y_hat.size() != y.size()) {
    throw UsageError("bce length mismatch: " + std::to_string(y_hat.size()) + " predictions, " +
                     std::to_string(y.size()) + " targets");
  }
  if (y_hat.empty()) throw UsageError("bce of an empty batch");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double p = std::clamp(y_hat[i], autodiff::kProbabilityClamp, 1.0 - autodiff::kProbabilityClamp);
    s += y[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return -s / static_cast<double>(y.size());
}

TrainResult train(Model& model, const std::vector<PaddedTweet>& data, const std::vector<int>& labels,
                  const TrainingConfig& config) {
  config.validate();
  if (data.empty()) throw DataError("no training examples");
  if (data.size() != labels.size()) throw DataError("training data and label counts differ");
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
  }

  const Rng root(config.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> train_idx = order, val_idx;
  if (config.validation_fraction > 0.0) {
    Rng split = root.fork(1);
    split.shuffle(std::span<std::size_t>(order));
    const auto n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(config.validation_fraction * static_cast<double>(data.size()))));
    if (n_val >= data.size()) throw DataError("validation split leaves no training examples");
    val_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    train_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    std::sort(train_idx.begin(), train_idx.end());
  }

  auto& params = model.parameters();
  std::vector<Tensor> accum;
  for (const auto& p : params) accum.emplace_back(p.value.rows, p.value.cols);
  Rng dropout_rng = root.fork(2);

  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best_values;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng epoch_rng = root.fork(100 + epoch);
    epoch_rng.shuffle(std::span<std::size_t>(train_idx));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < train_idx.size(); start += config.batch_size) {
      const std::size_t end = std::min(train_idx.size(), start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto& p : params) p.zero_grad();
      double batch_loss = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        const auto i = train_idx[b];
        Tape tape;
        const Var y_hat = model.forward(tape, data[i], config.dropout, &dropout_rng);
        const Var loss = autodiff::bce(y_hat, labels[i]);
        batch_loss += loss.value().data[0];
        tape.backward(loss, scale);
      }
      if (!std::isfinite(batch_loss)) {
        throw DivergenceError("training diverged: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(start / config.batch_size + 1));
      }
      epoch_loss += batch_loss;
      for (std::size_t k = 0; k < params.size(); ++k) {
        auto& p = params[k];
        if (p.name == "embedding" && !model.config().train_embeddings) continue;
        for (std::size_t e = 0; e < p.value.size(); ++e) {
          const double g = p.grad.data[e];
          if (g == 0.0) continue;
          if (config.optimizer == Optimizer::Sgd) {
            p.value.data[e] -= config.learning_rate * g;
          } else {
            accum[k].data[e] += g * g;
            p.value.data[e] -= config.learning_rate * g / (std::sqrt(accum[k].data[e]) + config.adagrad_epsilon);
          }
        }
      }
    }
    result.train_loss.push_back(epoch_loss / static_cast<double>(train_idx.size()));

    if (val_idx.empty()) {
      result.best_epoch = epoch;
      continue;
    }
    std::vector<double> preds;
    std::vector<int> ys;
    for (auto i : val_idx) {
      preds.push_back(model.predict_proba(data[i]));
      ys.push_back(labels[i]);
    }
    const double val = bce_loss(preds, ys);
    if (!std::isfinite(val)) throw DivergenceError("training diverged: non-finite validation loss at epoch " + std::to_string(epoch));
    result.val_loss.push_back(val);
    if (val < best_val) {
      best_val = val;
      result.best_epoch = epoch;
      since_best = 0;
      best_values.clear();
      for (const auto& p : params) best_values.push_back(p.value);
    } else if (++since_best >= config.patience) {
      result.stopped_early = true;
      break;
    }
  }
  if (!best_values.empty()) {
    for (std::size_t k = 0; k < params.size(); ++k) params[k].value = best_values[k];
  }
  for (auto& p : params) p.zero_grad();
  return result;
}

double grad_check(Model& model, const PaddedTweet& tweet, int label, double eps) {
  auto& params = model.parameters();
  for (auto& p : params) p.zero_grad();
  {
    Tape tape;
    const Var loss = autodiff::bce(model.forward(tape, tweet), label);
    tape.backward(loss);
  }
  std::vector<Tensor> analytic;
  for (const auto& p : params) analytic.push_back(p.grad);

  const auto loss_at = [&] {
    Tape tape;
    return autodiff::bce(model.forward(tape, tweet), label).value().data[0];
  };
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = params[k];
    for (std::size_t e = 0; e < p.value.size(); ++e) {
      if (p.freeze_first_row && e < p.value.cols) continue;
      const double keep = p.value.data[e];
      p.value.data[e] = keep + eps;
      const double up = loss_at();
      p.value.data[e] = keep - eps;
      const double down = loss_at();
      p.value.data[e] = keep;
      const double numeric = (up - down) / (2 * eps);
      const double a = analytic[k].data[e];
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6}));
    }
  }
  for (auto& p : params) p.zero_grad();
  return worst;
}

std::string loss_curve_csv(const TrainResult& result) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "epoch,train_loss,val_loss\n";
  for (std::size_t e = 0; e < result.train_loss.size(); ++e) {
    out << e + 1 << ',' << result.train_loss[e] << ',';
    if (e < result.val_loss.size()) out << result.val_loss[e];
    out << '\n';
  }
  return out.str();
}

}  // namespace numsarc::neural
