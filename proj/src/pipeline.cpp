#include "numsarc/pipeline.hpp"

#include "numsarc/classic_ml.hpp"
#include "numsarc/error.hpp"
#include "numsarc/features.hpp"
#include "numsarc/fingerprint.hpp"
#include "numsarc/neural.hpp"

namespace numsarc::eval {

namespace {

std::string hash_json(const nlohmann::json& j) {
  Fingerprint fp;
  fp.add(std::string_view(j.dump()));
  return fp.hex();
}

std::vector<std::vector<std::string>> sentences_of(const std::vector<text::AnalyzedTweet>& tweets) {
  std::vector<std::vector<std::string>> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) out.push_back(t.words());
  return out;
}

void require_both_classes(const std::vector<int>& y) {
  bool has0 = false;
  bool has1 = false;
  for (int v : y) (v == 1 ? has1 : has0) = true;
  if (!has0 || !has1) throw DataError("training data must contain both classes");
}

TablePtr table_from_json(const nlohmann::json& j) {
  if (!j.contains("embeddings")) return nullptr;
  return std::make_shared<embeddings::EmbeddingTable>(
      embeddings::parse_embeddings(j.at("embeddings").get<std::string>()));
}

void check_artifact(const nlohmann::json& j) {
  if (!j.is_object() || j.value("kind", "") != "pipeline" || j.value("version", 0) != 1) {
    throw DataError("not a pipeline artifact (expected kind 'pipeline', version 1)");
  }
}

nlohmann::json artifact_header(const RunConfig& config) {
  return {{"kind", "pipeline"}, {"version", 1}, {"pipeline", config.pipeline}, {"config", config.to_json()}};
}

// ---- classic feature-based models

class ClassicPipeline : public Pipeline {
 public:
  ClassicPipeline(RunConfig config, TablePtr table) : config_(std::move(config)), table_(std::move(table)) {}

  std::string name() const override { return config_.pipeline; }

  void fit(const std::vector<text::AnalyzedTweet>& train) override {
    const auto y = gold_labels(train);
    require_both_classes(y);
    features_ = config_.features;
    features_.unit_vocabulary = features::collect_unit_vocabulary(train);
    if (features_.tweet_embedding) {
      if (!table_) {
        auto sgns = config_.sgns;
        if (features_.embedding_dim > 0) sgns.dim = features_.embedding_dim;
        table_ = std::make_shared<embeddings::EmbeddingTable>(train_table(train, sgns));
        table_trained_ = true;
      }
      features_.embedding_dim = table_->dim();
    }
    classic_ml::Matrix X = featurize(train);
    const auto& kind = config_.pipeline;
    if (kind == "forest") {
      forest_ = classic_ml::forest_train(X, y, config_.forest);
    } else {
      scaler_ = classic_ml::Standardizer::fit(X);
      X = scaler_.transform(X);
      if (kind == "knn") {
        knn_ = classic_ml::knn_fit(std::move(X), y, config_.knn_k);
      } else {
        auto svm_config = config_.svm;
        if (config_.svm_grid_search) {
          const auto grid = classic_ml::svm_grid_search(X, y, 3, config_.seed, svm_config);
          const classic_ml::GridPoint* best = &grid.front();
          for (const auto& g : grid) {
            if (g.accuracy > best->accuracy) best = &g;
          }
          svm_config.C = best->C;
          svm_config.gamma = best->gamma;
          grid_ = grid;
        }
        std::vector<int> signs;
        signs.reserve(y.size());
        for (int v : y) signs.push_back(v == 1 ? 1 : -1);
        svm_ = classic_ml::svm_train(X, signs, svm_config);
      }
    }
    fitted_ = true;
  }

  std::vector<int> predict(const std::vector<text::AnalyzedTweet>& tweets) const override {
    if (!fitted_) throw UsageError(name() + " pipeline used before fit");
    classic_ml::Matrix X = featurize(tweets);
    std::vector<int> out;
    out.reserve(X.size());
    for (auto& row : X) {
      if (config_.pipeline == "forest") {
        out.push_back(classic_ml::forest_predict(forest_, row));
        continue;
      }
      const auto z = scaler_.transform(row);
      out.push_back(config_.pipeline == "knn" ? classic_ml::knn_classify(knn_, z) : classic_ml::svm_predict(svm_, z));
    }
    return out;
  }

  std::map<std::string, std::string> fingerprints() const override {
    std::map<std::string, std::string> fp;
    fp["unit_vocabulary"] = hash_json(features_.unit_vocabulary);
    if (config_.pipeline != "forest") fp["scaler"] = hash_json(scaler_.to_json());
    fp["model"] = hash_json(model_json());
    if (table_trained_) fp["embeddings"] = table_->fingerprint();
    return fp;
  }

  nlohmann::json to_json() const override {
    auto j = artifact_header(config_);
    j["features"] = features_.to_json();
    if (config_.pipeline != "forest") j["scaler"] = scaler_.to_json();
    j["model"] = model_json();
    if (features_.tweet_embedding && table_) j["embeddings"] = table_->to_text();
    return j;
  }

  nlohmann::json training_info() const override {
    nlohmann::json info = {{"features", features::column_names(features_).size()}};
    if (config_.pipeline == "forest") info["oob_accuracy"] = forest_.oob_accuracy;
    if (config_.pipeline == "svm") {
      info["iterations"] = svm_.iterations;
      info["converged"] = svm_.converged;
      info["support_vectors"] = svm_.support_indices.size();
      info["C"] = svm_.C;
      info["gamma"] = svm_.gamma;
      if (!grid_.empty()) {
        nlohmann::json g = nlohmann::json::array();
        for (const auto& p : grid_) g.push_back({{"C", p.C}, {"gamma", p.gamma}, {"accuracy", p.accuracy}});
        info["grid"] = g;
      }
    }
    return info;
  }

  static std::unique_ptr<ClassicPipeline> from_json(const nlohmann::json& j) {
    auto config = RunConfig::from_json(j.at("config"));
    auto p = std::make_unique<ClassicPipeline>(config, table_from_json(j));
    p->features_ = features::FeatureConfig::from_json(j.at("features"));
    if (config.pipeline != "forest") p->scaler_ = classic_ml::Standardizer::from_json(j.at("scaler"));
    const auto& m = j.at("model");
    if (config.pipeline == "knn") p->knn_ = classic_ml::KnnModel::from_json(m);
    if (config.pipeline == "svm") p->svm_ = classic_ml::SvmModel::from_json(m);
    if (config.pipeline == "forest") p->forest_ = classic_ml::ForestModel::from_json(m);
    p->fitted_ = true;
    return p;
  }

 private:
  classic_ml::Matrix featurize(const std::vector<text::AnalyzedTweet>& tweets) const {
    classic_ml::Matrix X;
    X.reserve(tweets.size());
    for (const auto& t : tweets) X.push_back(features::assemble_features(t, features_, table_.get()).values);
    return X;
  }

  nlohmann::json model_json() const {
    if (config_.pipeline == "knn") return knn_.to_json();
    if (config_.pipeline == "svm") return svm_.to_json();
    return forest_.to_json();
  }

  RunConfig config_;
  TablePtr table_;
  bool table_trained_ = false;
  bool fitted_ = false;
  features::FeatureConfig features_;
  classic_ml::Standardizer scaler_;
  classic_ml::KnnModel knn_;
  classic_ml::SvmModel svm_;
  classic_ml::ForestModel forest_;
  std::vector<classic_ml::GridPoint> grid_;
};

// ---- neural models

class NeuralPipeline : public Pipeline {
 public:
  NeuralPipeline(RunConfig config, TablePtr table) : config_(std::move(config)), table_(std::move(table)) {}

  std::string name() const override { return config_.pipeline; }

  void fit(const std::vector<text::AnalyzedTweet>& train) override {
    const auto y = gold_labels(train);
    require_both_classes(y);
    const auto sentences = sentences_of(train);
    auto vocab = neural::Vocabulary::from_sentences(sentences);
    model_ = std::make_unique<neural::Model>(config_.model, std::move(vocab), config_.seed, table_.get());
    std::vector<neural::PaddedTweet> padded;
    padded.reserve(sentences.size());
    for (const auto& s : sentences) {
      padded.push_back(neural::pad_and_index(s, model_->vocabulary(), config_.model.sequence_length));
    }
    result_ = neural::train(*model_, padded, y, config_.training);
  }

  std::vector<int> predict(const std::vector<text::AnalyzedTweet>& tweets) const override {
    if (!model_) throw UsageError(name() + " pipeline used before fit");
    std::vector<int> out;
    out.reserve(tweets.size());
    for (const auto& t : tweets) {
      out.push_back(model_->predict(
          neural::pad_and_index(t.words(), model_->vocabulary(), config_.model.sequence_length)));
    }
    return out;
  }

  std::map<std::string, std::string> fingerprints() const override {
    if (!model_) return {};
    return {{"vocabulary", model_->vocabulary().fingerprint()}, {"model", model_->fingerprint()}};
  }

  nlohmann::json to_json() const override {
    if (!model_) throw UsageError(name() + " pipeline used before fit");
    auto j = artifact_header(config_);
    j["model"] = model_->to_json();
    j["training"] = training_info();
    return j;
  }

  nlohmann::json training_info() const override {
    return {{"train_loss", result_.train_loss},
            {"val_loss", result_.val_loss},
            {"best_epoch", result_.best_epoch},
            {"stopped_early", result_.stopped_early}};
  }

  static std::unique_ptr<NeuralPipeline> from_json(const nlohmann::json& j) {
    auto p = std::make_unique<NeuralPipeline>(RunConfig::from_json(j.at("config")), nullptr);
    p->model_ = std::make_unique<neural::Model>(neural::Model::from_json(j.at("model")));
    if (j.contains("training")) {
      const auto& t = j.at("training");
      p->result_.train_loss = t.value("train_loss", std::vector<double>{});
      p->result_.val_loss = t.value("val_loss", std::vector<double>{});
      p->result_.best_epoch = t.value("best_epoch", std::size_t{0});
      p->result_.stopped_early = t.value("stopped_early", false);
    }
    return p;
  }

 private:
  RunConfig config_;
  TablePtr table_;
  std::unique_ptr<neural::Model> model_;
  neural::TrainResult result_;
};

}  // namespace

embeddings::EmbeddingTable train_table(const std::vector<text::AnalyzedTweet>& tweets,
                                       const embeddings::SgnsConfig& config) {
  return embeddings::train_sgns(sentences_of(tweets), config).table;
}

RulePipeline::RulePipeline(RunConfig config, TablePtr table) : config_(std::move(config)), table_(std::move(table)) {
  config_.rule.strategy = config_.pipeline == "rule-cosine" ? rulebase::Strategy::Cosine : rulebase::Strategy::Exact;
}

void RulePipeline::fit(const std::vector<text::AnalyzedTweet>& train) {
  const auto y = gold_labels(train);
  std::vector<text::AnalyzedTweet> positive;
  std::vector<text::AnalyzedTweet> negative;
  for (std::size_t i = 0; i < train.size(); ++i) (y[i] == 1 ? positive : negative).push_back(train[i]);
  const bool cosine = config_.rule.strategy == rulebase::Strategy::Cosine;
  if (cosine && !table_) {
    table_ = std::make_shared<embeddings::EmbeddingTable>(train_table(train, config_.sgns));
    table_trained_ = true;
  }
  const auto* table = cosine ? table_.get() : nullptr;
  sarcastic_ = rulebase::build_repository(positive, 1, table);
  non_sarcastic_ = rulebase::build_repository(negative, 0, table);
  fitted_ = true;
}

void RulePipeline::require_fitted() const {
  if (!fitted_) throw UsageError(name() + " pipeline used before fit");
}

rulebase::RulePrediction RulePipeline::explain(const text::AnalyzedTweet& tweet) const {
  require_fitted();
  return rulebase::predict_rule(tweet, sarcastic_, non_sarcastic_, config_.rule, table_.get());
}

std::vector<int> RulePipeline::predict(const std::vector<text::AnalyzedTweet>& tweets) const {
  std::vector<int> out;
  out.reserve(tweets.size());
  for (const auto& t : tweets) out.push_back(explain(t).label);
  return out;
}

std::map<std::string, std::string> RulePipeline::fingerprints() const {
  std::map<std::string, std::string> fp{{"repository.sarcastic", hash_json(sarcastic_.to_json())},
                                        {"repository.non_sarcastic", hash_json(non_sarcastic_.to_json())}};
  if (table_trained_) fp["embeddings"] = table_->fingerprint();
  return fp;
}

nlohmann::json RulePipeline::to_json() const {
  require_fitted();
  auto j = artifact_header(config_);
  j["sarcastic"] = sarcastic_.to_json();
  j["non_sarcastic"] = non_sarcastic_.to_json();
  if (config_.rule.strategy == rulebase::Strategy::Cosine && table_) j["embeddings"] = table_->to_text();
  return j;
}

nlohmann::json RulePipeline::training_info() const {
  return {{"sarcastic_entries", sarcastic_.entries.size()},
          {"non_sarcastic_entries", non_sarcastic_.entries.size()},
          {"sarcastic_units", sarcastic_.unit_stats.size()},
          {"non_sarcastic_units", non_sarcastic_.unit_stats.size()}};
}

std::unique_ptr<RulePipeline> RulePipeline::from_json(const nlohmann::json& j) {
  auto p = std::make_unique<RulePipeline>(RunConfig::from_json(j.at("config")), table_from_json(j));
  p->sarcastic_ = rulebase::Repository::from_json(j.at("sarcastic"));
  p->non_sarcastic_ = rulebase::Repository::from_json(j.at("non_sarcastic"));
  if (p->config_.rule.strategy == rulebase::Strategy::Cosine && !p->table_) {
    throw DataError("rule-cosine artifact lacks embeddings");
  }
  p->fitted_ = true;
  return p;
}

std::unique_ptr<Pipeline> make_pipeline(const RunConfig& config, TablePtr table) {
  config.validate();
  const auto& name = config.pipeline;
  if (name == "rule-exact" || name == "rule-cosine") return std::make_unique<RulePipeline>(config, std::move(table));
  if (name == "knn" || name == "svm" || name == "forest") return std::make_unique<ClassicPipeline>(config, std::move(table));
  return std::make_unique<NeuralPipeline>(config, std::move(table));
}

std::unique_ptr<Pipeline> load_pipeline(const nlohmann::json& j) {
  check_artifact(j);
  try {
    const auto name = j.at("pipeline").get<std::string>();
    if (name == "rule-exact" || name == "rule-cosine") return RulePipeline::from_json(j);
    if (name == "knn" || name == "svm" || name == "forest") return ClassicPipeline::from_json(j);
    if (is_neural_pipeline(name)) return NeuralPipeline::from_json(j);
    throw DataError("artifact names unknown pipeline '" + name + "'");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed pipeline artifact: ") + e.what());
  }
}

}  // namespace numsarc::eval
