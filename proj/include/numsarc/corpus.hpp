#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "numsarc/text.hpp"

namespace numsarc::corpus {

struct RawTweet {
  std::string id;
  std::string text;
  std::optional<int> label;  // pre-assigned label, if the source already has one
};

struct LabeledTweet {
  std::string id;
  std::string text;     // normalized, lowercased
  std::string surface;  // normalized, case preserved
  int label = 0;        // 1 = sarcastic
};

/// Hashtags that mark sarcastic / non-sarcastic tweets, without '#'.
const std::unordered_set<std::string>& sarcastic_hashtags();
const std::unordered_set<std::string>& non_sarcastic_hashtags();
/// Union of both sets; these never survive normalization.
const std::unordered_set<std::string>& label_hashtags();

/// Lowercases and strips URLs, @-mentions, non-ASCII, label hashtags and a
/// leading "rt". Returns nullopt when nothing remains. `keep_case` skips the
/// lowercasing so punctuation features can still see capitals.
std::optional<std::string> normalize_tweet(const RawTweet& raw,
                                           const std::unordered_set<std::string>& label_tags = label_hashtags(),
                                           bool keep_case = false);

/// 1 for a sarcastic hashtag, 0 for a non-sarcastic one, nullopt for none or both.
std::optional<int> label_by_hashtag(std::string_view text);

bool is_numeric_tweet(const std::vector<text::Token>& tokens);

/// Fraction of tweets containing a pure numeric token. Throws DataError on an empty corpus.
double numeric_fraction(const std::vector<LabeledTweet>& corpus);

struct IngestReport {
  std::vector<LabeledTweet> tweets;
  std::size_t unlabeled = 0;   // no marker, or conflicting markers
  std::size_t empty = 0;       // nothing left after normalization
  std::size_t duplicates = 0;  // same normalized text seen before
};

/// Labels, normalizes and deduplicates (key: normalized text, first wins).
IngestReport ingest(const std::vector<RawTweet>& raw);

enum class DatasetName { D1, D2, D3, Test, Custom };

struct DatasetPreset {
  DatasetName name = DatasetName::Custom;
  std::size_t pos_count = 0;
  std::size_t neg_count = 0;
  bool numeric_only_positive = false;

  /// "d1", "d2", "d3", "test" (case-insensitive). Throws UsageError otherwise.
  static DatasetPreset preset(std::string_view name);
};

std::string_view dataset_name(DatasetName name);

/// Seeded uniform sample without replacement, returned in corpus order.
std::vector<LabeledTweet> build_dataset(const std::vector<LabeledTweet>& corpus, const DatasetPreset& preset,
                                        std::uint64_t seed);

struct FoldAssignment {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> ids;    // dataset order
  std::vector<std::size_t> folds;  // parallel to ids

  std::size_t fold_of(const std::string& id) const;
  nlohmann::json to_json() const;
  static FoldAssignment from_json(const nlohmann::json& j);
};

/// Per-class round-robin over a seeded shuffle; fold class counts are within
/// one of the proportional share.
FoldAssignment stratified_kfold(const std::vector<std::string>& ids, const std::vector<int>& labels, std::size_t k,
                                std::uint64_t seed);
FoldAssignment stratified_kfold(const std::vector<LabeledTweet>& dataset, std::size_t k, std::uint64_t seed);

/// JSON Lines: {"id": str, "text": str, "label": 0|1 (optional)}.
std::vector<RawTweet> read_raw_jsonl(const std::filesystem::path& path);
std::vector<RawTweet> parse_raw_jsonl(std::string_view content);
/// Requires a label on every line.
std::vector<LabeledTweet> read_labeled_jsonl(const std::filesystem::path& path);
std::string to_jsonl(const std::vector<LabeledTweet>& tweets);

}  // namespace numsarc::corpus
