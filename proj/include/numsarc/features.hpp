#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "numsarc/embeddings.hpp"
#include "numsarc/text.hpp"

namespace numsarc::features {

struct SentimentLexicon {
  std::unordered_set<std::string> positive;
  std::unordered_set<std::string> negative;

  /// One word per line, '#' comments. Throws DataError if the sets overlap.
  static SentimentLexicon from_text(std::string_view positive_content, std::string_view negative_content);
  static SentimentLexicon from_files(const std::filesystem::path& positive, const std::filesystem::path& negative);
  static const SentimentLexicon& builtin();
};

struct EmoticonLexicon {
  std::unordered_set<std::string> positive;
  std::unordered_set<std::string> negative;

  static EmoticonLexicon from_text(std::string_view positive_content, std::string_view negative_content);
  static const EmoticonLexicon& builtin();
};

enum class Family { Sentiment, Emoticon, Punctuation, NumberValue, UnitOneHot, TweetEmbedding };

std::string_view family_name(Family family);

struct FeatureConfig {
  bool sentiment = true;
  bool emoticon = true;
  bool punctuation = true;
  bool number_value = true;
  bool unit_onehot = true;
  bool tweet_embedding = false;
  std::size_t embedding_dim = 0;
  std::vector<std::string> unit_vocabulary;  // frozen at training time

  /// Throws UsageError if no family is enabled.
  void validate() const;
  nlohmann::json to_json() const;
  static FeatureConfig from_json(const nlohmann::json& j);
};

struct Segment {
  Family family;
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct FeatureVector {
  std::vector<double> values;
  std::vector<Segment> layout;
};

/// (positive, negative, highly-emotional positive, highly-emotional negative).
std::array<double, 4> sentiment_features(const text::AnalyzedTweet& tweet,
                                         const SentimentLexicon& lexicon = SentimentLexicon::builtin());

/// (positive emoticon, negative emoticon, word contrast, word/emoticon contrast), all 0/1.
std::array<double, 4> emoticon_features(const text::AnalyzedTweet& tweet,
                                        const SentimentLexicon& words = SentimentLexicon::builtin(),
                                        const EmoticonLexicon& emoticons = EmoticonLexicon::builtin());

/// ('!', '.', '?', all-caps words of length >= 2, '\'') counts. "…" counts as three dots.
std::array<double, 5> punctuation_features(std::string_view text);

struct NumericFeatures {
  double value = 0.0;
  std::vector<double> unit_onehot;
};

/// First mention's value and a one-hot over the unit vocabulary (zeros for unknown or missing units).
NumericFeatures numeric_features(const text::AnalyzedTweet& tweet, const FeatureConfig& config);

/// Canonical units of first mentions, sorted; used to freeze the unit vocabulary on training data.
std::vector<std::string> collect_unit_vocabulary(const std::vector<text::AnalyzedTweet>& tweets);

/// Families in fixed order: S(4), E(4), P(5), value(1), units(|units|), embedding(d).
FeatureVector assemble_features(const text::AnalyzedTweet& tweet, const FeatureConfig& config,
                                const embeddings::EmbeddingTable* table = nullptr,
                                const SentimentLexicon& words = SentimentLexicon::builtin(),
                                const EmoticonLexicon& emoticons = EmoticonLexicon::builtin());

std::vector<Segment> feature_layout(const FeatureConfig& config);
/// Column names such as "sentiment.pos" or "unit.hours" for CSV headers.
std::vector<std::string> column_names(const FeatureConfig& config);
std::string to_csv(const FeatureConfig& config, const std::vector<FeatureVector>& rows,
                   const std::vector<int>* labels = nullptr);

}  // namespace numsarc::features
