#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "numsarc/corpus.hpp"
#include "numsarc/text.hpp"

namespace numsarc::eval {

/// Class 1 is the numeric-sarcastic (positive) class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws UsageError on a length mismatch or a label outside {0, 1}.
ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> golds);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct PerClass {
  ClassMetrics sarcastic;      // class 1
  ClassMetrics non_sarcastic;  // class 0
};

/// 2pr/(p+r), 0 when p + r == 0.
double f_score(double precision, double recall);
PerClass prf_per_class(const ConfusionMatrix& cm);

/// (m1*s1 + m0*s0)/(s1 + s0). Throws UsageError for zero total support.
double weighted_average(double metric1, double metric0, double support1, double support0);

struct MetricsReport {
  PerClass classes;
  double precision_avg = 0.0;
  double recall_avg = 0.0;
  double f_avg = 0.0;
  double accuracy = 0.0;
  ConfusionMatrix cm;

  /// Averages are support-weighted; a test set with no examples gives all zeros.
  static MetricsReport from_confusion(const ConfusionMatrix& cm);
  nlohmann::json to_json() const;
};

/// Unweighted per-field mean; confusion counts are summed.
MetricsReport mean_report(const std::vector<MetricsReport>& reports);

/// Two-decimal half-up table with one row per report.
std::string format_table(const std::vector<std::pair<std::string, MetricsReport>>& rows);

/// A trainable classifier over analyzed tweets.
class Pipeline {
 public:
  virtual ~Pipeline() = default;
  virtual std::string name() const = 0;
  virtual void fit(const std::vector<text::AnalyzedTweet>& train) = 0;
  virtual std::vector<int> predict(const std::vector<text::AnalyzedTweet>& tweets) const = 0;
  /// Hashes of everything derived from the training data (vocabularies, scalers, repositories, models).
  virtual std::map<std::string, std::string> fingerprints() const = 0;
  virtual nlohmann::json to_json() const = 0;
  /// Model-specific training diagnostics (losses, OOB accuracy, SMO iterations).
  virtual nlohmann::json training_info() const { return nlohmann::json::object(); }
};

using PipelineFactory = std::function<std::unique_ptr<Pipeline>()>;

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  MetricsReport report;
  std::map<std::string, std::string> fingerprints;
};

struct CrossValReport {
  std::vector<FoldResult> folds;
  MetricsReport mean;

  nlohmann::json to_json() const;
};

/// Trains a fresh pipeline per fold on the other folds. Every tweet needs a label.
/// Throws DataError when the assignment names an id absent from the dataset or omits one.
CrossValReport crossvalidate(const PipelineFactory& factory, const std::vector<text::AnalyzedTweet>& dataset,
                             const corpus::FoldAssignment& folds);

/// Labels of analyzed tweets; throws DataError for an unlabeled tweet.
std::vector<int> gold_labels(const std::vector<text::AnalyzedTweet>& tweets);

}  // namespace numsarc::eval
