#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "numsarc/config.hpp"
#include "numsarc/eval.hpp"
#include "numsarc/rulebase.hpp"

namespace numsarc::eval {

using TablePtr = std::shared_ptr<const embeddings::EmbeddingTable>;

/// Rule cascade over per-class repositories built from the training tweets.
class RulePipeline : public Pipeline {
 public:
  /// Without `table`, the cosine strategy trains SGNS vectors on the training tweets.
  explicit RulePipeline(RunConfig config, TablePtr table = nullptr);

  std::string name() const override { return config_.pipeline; }
  void fit(const std::vector<text::AnalyzedTweet>& train) override;
  std::vector<int> predict(const std::vector<text::AnalyzedTweet>& tweets) const override;
  std::map<std::string, std::string> fingerprints() const override;
  nlohmann::json to_json() const override;
  nlohmann::json training_info() const override;

  rulebase::RulePrediction explain(const text::AnalyzedTweet& tweet) const;
  const rulebase::Repository& sarcastic() const { return sarcastic_; }
  const rulebase::Repository& non_sarcastic() const { return non_sarcastic_; }

  static std::unique_ptr<RulePipeline> from_json(const nlohmann::json& j);

 private:
  void require_fitted() const;

  RunConfig config_;
  TablePtr table_;
  bool table_trained_ = false;
  bool fitted_ = false;
  rulebase::Repository sarcastic_;
  rulebase::Repository non_sarcastic_;
};

/// Builds the pipeline named in `config`. `table` is optional pretrained word vectors.
std::unique_ptr<Pipeline> make_pipeline(const RunConfig& config, TablePtr table = nullptr);

/// Restores a fitted pipeline from Pipeline::to_json output.
std::unique_ptr<Pipeline> load_pipeline(const nlohmann::json& j);

/// SGNS vectors trained on the token sequences of `tweets`.
embeddings::EmbeddingTable train_table(const std::vector<text::AnalyzedTweet>& tweets,
                                       const embeddings::SgnsConfig& config);

}  // namespace numsarc::eval
