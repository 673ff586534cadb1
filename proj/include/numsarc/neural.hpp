#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "numsarc/autodiff.hpp"
#include "numsarc/embeddings.hpp"
#include "numsarc/rng.hpp"

namespace numsarc::neural {

using autodiff::Activation;
using autodiff::Tensor;

inline constexpr std::size_t kPadIndex = 0;
inline constexpr std::size_t kUnkIndex = 1;
inline constexpr std::size_t kSequenceLength = 36;

/// Index 0 is PAD and index 1 is UNK; other words follow in first-seen order.
class Vocabulary {
 public:
  Vocabulary();
  static Vocabulary from_sentences(const std::vector<std::vector<std::string>>& sentences, std::size_t min_count = 1);
  static Vocabulary from_words(const std::vector<std::string>& words);

  std::size_t index_of(std::string_view word) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  std::string fingerprint() const;

 private:
  void add(const std::string& word);
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct PaddedTweet {
  std::vector<std::size_t> indices;
};

/// OOV tokens map to UNK; longer inputs are truncated, shorter ones right-padded with PAD.
PaddedTweet pad_and_index(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                          std::size_t length = kSequenceLength);

struct ConvFilter {
  std::size_t width = 0;
  Tensor weights;  // width x d
  double bias = 0.0;
};

/// c_p = func(sum(window_p * f) + b) for every window of `width` consecutive rows.
std::vector<double> conv_feature_map(const Tensor& input, const ConvFilter& filter, Activation func);
double max_over_time_pool(std::span<const double> map);

struct LstmCell {
  std::size_t hidden = 0;
  std::size_t input = 0;
  Tensor W_i, W_f, W_C, W_o;  // hidden x (hidden + input), over [h_prev, x]
  std::vector<double> b_i, b_f, b_C, b_o;

  static LstmCell zeros(std::size_t hidden, std::size_t input);
};

struct LstmState {
  std::vector<double> h;
  std::vector<double> C;
};

LstmState lstm_step(const LstmCell& cell, std::span<const double> x, const LstmState& state);

enum class Architecture { CnnFf, LstmFf, CnnLstmFf };
enum class Optimizer { Sgd, Adagrad };

std::string architecture_name(Architecture a);
Architecture parse_architecture(const std::string& name);
std::string optimizer_name(Optimizer o);
Optimizer parse_optimizer(const std::string& name);

struct ModelConfig {
  Architecture architecture = Architecture::CnnFf;
  std::size_t sequence_length = kSequenceLength;
  std::size_t embedding_dim = 200;
  std::vector<std::size_t> filter_widths{3, 4, 5};  // CNN-FF
  std::size_t filters_per_width = 128;               // CNN-FF
  std::size_t hidden = 128;                          // LSTM hidden size
  std::size_t cnn_lstm_filters = 64;
  std::size_t cnn_lstm_width = 5;
  std::size_t pool_size = 4;
  Activation func = Activation::Tanh;
  bool train_embeddings = true;

  static ModelConfig preset(Architecture a);
  /// Throws UsageError for inconsistent shapes, e.g. a pool size that does not divide the conv length.
  void validate() const;
  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

struct TrainingConfig {
  std::size_t batch_size = 64;
  Optimizer optimizer = Optimizer::Sgd;
  double learning_rate = 0.1;
  double dropout = 0.5;
  std::size_t epochs = 25;
  std::uint64_t seed = 1;
  double validation_fraction = 0.0;  // > 0 enables early stopping
  std::size_t patience = 3;
  double adagrad_epsilon = 1e-8;

  static TrainingConfig preset(Architecture a);
  void validate() const;
  nlohmann::json to_json() const;
  static TrainingConfig from_json(const nlohmann::json& j);
};

class Model {
 public:
  Model(ModelConfig config, Vocabulary vocab, std::uint64_t seed,
        const embeddings::EmbeddingTable* pretrained = nullptr);

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  std::vector<autodiff::Parameter>& parameters() { return params_; }
  const std::vector<autodiff::Parameter>& parameters() const { return params_; }
  autodiff::Parameter& parameter(const std::string& name);

  /// Length of the vector fed to the output layer.
  std::size_t feature_length() const;

  /// Builds the graph for one tweet and returns the 1x1 probability node. Dropout only when rng is given.
  autodiff::Var forward(autodiff::Tape& tape, const PaddedTweet& tweet, double dropout = 0.0, Rng* rng = nullptr);
  double predict_proba(const PaddedTweet& tweet);
  int predict(const PaddedTweet& tweet);

  std::string fingerprint() const;
  nlohmann::json to_json() const;
  static Model from_json(const nlohmann::json& j);

 private:
  void check_tweet(const PaddedTweet& tweet) const;

  ModelConfig config_;
  Vocabulary vocab_;
  std::vector<autodiff::Parameter> params_;
  std::unordered_map<std::string, std::size_t> param_index_;
};

/// -(1/e) sum(y log p + (1-y) log(1-p)) with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(std::span<const double> y_hat, std::span<const int> y);

struct TrainResult {
  std::vector<double> train_loss;
  std::vector<double> val_loss;  // empty without a validation split
  std::size_t best_epoch = 0;    // 1-based
  bool stopped_early = false;
};

/// Throws DivergenceError when the loss becomes NaN or infinite.
TrainResult train(Model& model, const std::vector<PaddedTweet>& data, const std::vector<int>& labels,
                  const TrainingConfig& config);

/// Worst relative error |a - n| / max(|a|, |n|, 1e-6) between reverse-mode and central-difference gradients.
double grad_check(Model& model, const PaddedTweet& tweet, int label, double eps = 1e-4);

std::string loss_curve_csv(const TrainResult& result);

}  // namespace numsarc::neural
