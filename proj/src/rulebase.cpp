#include "numsarc/rulebase.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "numsarc/error.hpp"

namespace numsarc::rulebase {

const UnitStats* Repository::stats_for(const std::string& unit) const {
  const auto it = unit_stats.find(unit);
  return it == unit_stats.end() ? nullptr : &it->second;
}

nlohmann::json Repository::to_json() const {
  nlohmann::json j;
  j["label"] = label;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json je;
    je["tweet_index"] = e.tweet_index;
    je["tweet_id"] = e.tweet_id;
    je["noun_phrase"] = e.noun_phrase_words;
    if (!e.noun_phrase_vector.empty()) je["vector"] = e.noun_phrase_vector;
    je["unit"] = e.unit ? nlohmann::json(*e.unit) : nlohmann::json(nullptr);
    je["value"] = e.value;
    j["entries"].push_back(std::move(je));
  }
  j["unit_stats"] = nlohmann::json::object();
  for (const auto& [unit, s] : unit_stats) {
    j["unit_stats"][unit] = {{"mean", s.mean}, {"stddev", s.stddev}, {"count", s.count}};
  }
  return j;
}

Repository Repository::from_json(const nlohmann::json& j) {
  Repository repo;
  try {
    repo.label = j.at("label").get<int>();
    for (const auto& je : j.at("entries")) {
      RepositoryEntry e;
      e.tweet_index = je.at("tweet_index").get<std::size_t>();
      e.tweet_id = je.value("tweet_id", std::string{});
      e.noun_phrase_words = je.at("noun_phrase").get<std::vector<std::string>>();
      if (je.contains("vector")) e.noun_phrase_vector = je.at("vector").get<std::vector<double>>();
      if (!je.at("unit").is_null()) e.unit = je.at("unit").get<std::string>();
      e.value = je.value("value", 0.0);
      repo.entries.push_back(std::move(e));
    }
    for (const auto& [unit, s] : j.at("unit_stats").items()) {
      repo.unit_stats[unit] = UnitStats{unit, s.at("mean").get<double>(), s.at("stddev").get<double>(),
                                        s.at("count").get<std::size_t>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed repository: ") + e.what());
  }
  for (const auto& e : repo.entries) {
    if (e.unit && !repo.unit_stats.contains(*e.unit)) {
      throw DataError("malformed repository: entry unit '" + *e.unit + "' has no statistics");
    }
  }
  return repo;
}

Repository build_repository(const std::vector<text::AnalyzedTweet>& tweets, int label,
                            const embeddings::EmbeddingTable* table) {
  Repository repo;
  repo.label = label;
  std::map<std::string, std::vector<double>> values_by_unit;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    const auto& t = tweets[i];
    if (t.label && *t.label != label) {
      throw UsageError("tweet '" + t.id + "' has label " + std::to_string(*t.label) + ", repository label is " +
                       std::to_string(label));
    }
    const auto* mention = t.first_mention();
    if (mention == nullptr) {
      repo.diagnostics.push_back(text::Diagnostic{i, "tweet '" + t.id + "' has no numeric mention; skipped"});
      continue;
    }
    RepositoryEntry entry;
    entry.tweet_index = i;
    entry.tweet_id = t.id;
    entry.noun_phrase_words = t.noun_phrase_words;
    entry.unit = mention->unit;
    entry.value = mention->value;
    if (table != nullptr) entry.noun_phrase_vector = embeddings::compose_vector(t.noun_phrase_words, *table).values;
    if (entry.unit) values_by_unit[*entry.unit].push_back(mention->value);
    repo.entries.push_back(std::move(entry));
  }
  for (const auto& [unit, values] : values_by_unit) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    repo.unit_stats[unit] = UnitStats{unit, mean, std::sqrt(ss / n), values.size()};
  }
  return repo;
}

bool within_interval(double value, const UnitStats& stats, double z) {
  if (!(z > 0.0)) throw UsageError("within_interval: z must be positive");
  return std::abs(value - stats.mean) <= z * stats.stddev;
}

std::optional<Match> match_exact(const std::vector<std::string>& query_words, const Repository& repo) {
  const std::set<std::string> query(query_words.begin(), query_words.end());
  std::optional<Match> best;
  for (const auto& entry : repo.entries) {
    std::set<std::string> words(entry.noun_phrase_words.begin(), entry.noun_phrase_words.end());
    std::size_t overlap = 0;
    for (const auto& w : words) overlap += query.contains(w) ? 1 : 0;
    if (overlap == 0) continue;
    const double score = static_cast<double>(overlap);
    if (!best || score > best->score || (score == best->score && entry.tweet_index < best->entry->tweet_index)) {
      best = Match{&entry, score};
    }
  }
  return best;
}

std::optional<Match> match_cosine(std::span<const double> query_vector, const Repository& repo, double min_similarity) {
  std::optional<Match> best;
  for (const auto& entry : repo.entries) {
    if (entry.noun_phrase_vector.size() != query_vector.size()) {
      throw UsageError("match_cosine: entry " + std::to_string(entry.tweet_index) + " has dimension " +
                       std::to_string(entry.noun_phrase_vector.size()) + ", query has " +
                       std::to_string(query_vector.size()));
    }
    const double sim = embeddings::cosine(query_vector, entry.noun_phrase_vector);
    if (!best || sim > best->score || (sim == best->score && entry.tweet_index < best->entry->tweet_index)) {
      best = Match{&entry, sim};
    }
  }
  if (!best || best->score < min_similarity) return std::nullopt;
  return best;
}

std::string_view path_name(Path path) {
  switch (path) {
    case Path::SarcMatchIn: return "SARC_MATCH_IN";
    case Path::SarcMatchOut: return "SARC_MATCH_OUT";
    case Path::NonsarcMatchIn: return "NONSARC_MATCH_IN";
    case Path::NonsarcMatchOut: return "NONSARC_MATCH_OUT";
    case Path::NoMatch: return "NO_MATCH";
  }
  return "NO_MATCH";
}

std::string_view strategy_name(Strategy strategy) { return strategy == Strategy::Exact ? "exact" : "cosine"; }

Strategy parse_strategy(std::string_view name) {
  if (name == "exact") return Strategy::Exact;
  if (name == "cosine") return Strategy::Cosine;
  throw UsageError("unknown rule strategy '" + std::string(name) + "'");
}

RulePrediction predict_rule(const text::AnalyzedTweet& test, const Repository& sarcastic,
                            const Repository& non_sarcastic, const RuleConfig& config,
                            const embeddings::EmbeddingTable* table) {
  RulePrediction prediction;
  const auto* mention = test.first_mention();
  if (mention == nullptr || !mention->unit) return prediction;
  prediction.unused_mentions.assign(test.mentions.begin() + 1, test.mentions.end());

  std::vector<double> query_vector;
  if (config.strategy == Strategy::Cosine) {
    if (table == nullptr) throw UsageError("cosine strategy needs an embedding table");
    query_vector = embeddings::compose_vector(test.noun_phrase_words, *table).values;
  }
  const auto find = [&](const Repository& repo) {
    return config.strategy == Strategy::Exact ? match_exact(test.noun_phrase_words, repo)
                                              : match_cosine(query_vector, repo, config.min_similarity);
  };
  // Returns true when the cascade stops at this repository.
  const auto consult = [&](const Repository& repo, Path in_path, Path out_path, int in_label) {
    const auto match = find(repo);
    if (!match || match->entry->unit != mention->unit) return false;
    const UnitStats* stats = repo.stats_for(*mention->unit);
    if (stats == nullptr) return false;
    const bool inside = within_interval(mention->value, *stats, config.z);
    prediction.path = inside ? in_path : out_path;
    prediction.label = inside ? in_label : 1 - in_label;
    prediction.matched_tweet_index = match->entry->tweet_index;
    prediction.match_score = match->score;
    prediction.interval = std::make_pair(stats->mean - config.z * stats->stddev, stats->mean + config.z * stats->stddev);
    return true;
  };
  if (consult(sarcastic, Path::SarcMatchIn, Path::SarcMatchOut, 1)) return prediction;
  if (consult(non_sarcastic, Path::NonsarcMatchIn, Path::NonsarcMatchOut, 0)) return prediction;
  return prediction;
}

}  // namespace numsarc::rulebase
