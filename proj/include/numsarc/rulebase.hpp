#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "numsarc/embeddings.hpp"
#include "numsarc/text.hpp"

namespace numsarc::rulebase {

/// Confidence-interval half width in standard deviations (99%).
inline constexpr double kDefaultZ = 2.58;
inline constexpr double kDefaultMinSimilarity = 0.5;

struct UnitStats {
  std::string unit;
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t count = 0;
};

struct RepositoryEntry {
  std::size_t tweet_index = 0;
  std::string tweet_id;
  std::vector<std::string> noun_phrase_words;
  std::vector<double> noun_phrase_vector;  // empty unless built with a table
  std::optional<std::string> unit;
  double value = 0.0;  // the mention value this entry contributed
};

struct Repository {
  int label = 0;
  std::vector<RepositoryEntry> entries;
  std::map<std::string, UnitStats> unit_stats;
  std::vector<text::Diagnostic> diagnostics;  // tweets skipped for lack of a mention

  const UnitStats* stats_for(const std::string& unit) const;
  nlohmann::json to_json() const;
  static Repository from_json(const nlohmann::json& j);
};

/// One entry per tweet with a numeric mention (first mention). Unit stats
/// aggregate every entry with the same canonical unit. Entry vectors are
/// composed from the noun-phrase list when `table` is given.
Repository build_repository(const std::vector<text::AnalyzedTweet>& tweets, int label,
                            const embeddings::EmbeddingTable* table = nullptr);

/// |value - mean| <= z * stddev. Throws UsageError for z <= 0.
bool within_interval(double value, const UnitStats& stats, double z);

struct Match {
  const RepositoryEntry* entry = nullptr;
  double score = 0.0;  // overlap count or cosine similarity
};

/// Entry with the largest set overlap; ties go to the lowest tweet index. nullopt when overlap is 0.
std::optional<Match> match_exact(const std::vector<std::string>& query_words, const Repository& repo);

/// Entry with the largest cosine similarity, nullopt below `min_similarity`.
std::optional<Match> match_cosine(std::span<const double> query_vector, const Repository& repo, double min_similarity);

enum class Strategy { Exact, Cosine };
enum class Path { SarcMatchIn, SarcMatchOut, NonsarcMatchIn, NonsarcMatchOut, NoMatch };

std::string_view path_name(Path path);
std::string_view strategy_name(Strategy strategy);
Strategy parse_strategy(std::string_view name);

struct RulePrediction {
  int label = 0;
  Path path = Path::NoMatch;
  std::optional<std::size_t> matched_tweet_index;
  std::optional<std::pair<double, double>> interval;
  double match_score = 0.0;
  std::vector<text::NumericMention> unused_mentions;  // mentions after the first
};

struct RuleConfig {
  Strategy strategy = Strategy::Exact;
  double z = kDefaultZ;
  double min_similarity = kDefaultMinSimilarity;
};

/// Sarcastic repository first, then non-sarcastic, else NO_MATCH (label 0).
/// `table` is required for the cosine strategy.
RulePrediction predict_rule(const text::AnalyzedTweet& test, const Repository& sarcastic,
                            const Repository& non_sarcastic, const RuleConfig& config,
                            const embeddings::EmbeddingTable* table = nullptr);

}  // namespace numsarc::rulebase
