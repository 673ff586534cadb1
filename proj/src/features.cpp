#include "numsarc/features.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "numsarc/error.hpp"
#include "numsarc/resources.hpp"
#include "numsarc/util.hpp"

namespace numsarc::features {

namespace {

std::unordered_set<std::string> word_set(std::string_view content) {
  std::unordered_set<std::string> out;
  for (auto& line : util::content_lines(content)) out.insert(util::to_lower(line));
  return out;
}

template <typename Lex>
Lex make_lexicon(std::string_view pos, std::string_view neg, const char* what) {
  Lex lex{word_set(pos), word_set(neg)};
  for (const auto& w : lex.positive) {
    if (lex.negative.contains(w)) throw DataError(std::string(what) + " lexicon lists '" + w + "' as both polarities");
  }
  return lex;
}

}  // namespace

SentimentLexicon SentimentLexicon::from_text(std::string_view positive_content, std::string_view negative_content) {
  return make_lexicon<SentimentLexicon>(positive_content, negative_content, "sentiment");
}

SentimentLexicon SentimentLexicon::from_files(const std::filesystem::path& positive,
                                              const std::filesystem::path& negative) {
  return from_text(util::read_file(positive), util::read_file(negative));
}

const SentimentLexicon& SentimentLexicon::builtin() {
  static const SentimentLexicon lex = from_text(resources::positive_words(), resources::negative_words());
  return lex;
}

EmoticonLexicon EmoticonLexicon::from_text(std::string_view positive_content, std::string_view negative_content) {
  return make_lexicon<EmoticonLexicon>(positive_content, negative_content, "emoticon");
}

const EmoticonLexicon& EmoticonLexicon::builtin() {
  static const EmoticonLexicon lex = from_text(resources::positive_emoticons(), resources::negative_emoticons());
  return lex;
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Sentiment: return "sentiment";
    case Family::Emoticon: return "emoticon";
    case Family::Punctuation: return "punctuation";
    case Family::NumberValue: return "number_value";
    case Family::UnitOneHot: return "unit_onehot";
    case Family::TweetEmbedding: return "tweet_embedding";
  }
  return "unknown";
}

void FeatureConfig::validate() const {
  if (!(sentiment || emoticon || punctuation || number_value || unit_onehot || tweet_embedding)) {
    throw UsageError("feature config enables no family");
  }
  if (tweet_embedding && embedding_dim == 0) throw UsageError("tweet_embedding needs a positive embedding_dim");
}

nlohmann::json FeatureConfig::to_json() const {
  return {{"sentiment", sentiment},         {"emoticon", emoticon},       {"punctuation", punctuation},
          {"number_value", number_value},   {"unit_onehot", unit_onehot}, {"tweet_embedding", tweet_embedding},
          {"embedding_dim", embedding_dim}, {"units", unit_vocabulary}};
}

FeatureConfig FeatureConfig::from_json(const nlohmann::json& j) {
  FeatureConfig c;
  c.sentiment = j.value("sentiment", c.sentiment);
  c.emoticon = j.value("emoticon", c.emoticon);
  c.punctuation = j.value("punctuation", c.punctuation);
  c.number_value = j.value("number_value", c.number_value);
  c.unit_onehot = j.value("unit_onehot", c.unit_onehot);
  c.tweet_embedding = j.value("tweet_embedding", c.tweet_embedding);
  c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
  c.unit_vocabulary = j.value("units", std::vector<std::string>{});
  return c;
}

std::array<double, 4> sentiment_features(const text::AnalyzedTweet& tweet, const SentimentLexicon& lexicon) {
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < tweet.tokens.size(); ++i) {
    const auto& w = tweet.tokens[i].surface;
    const bool emotional = i < tweet.tags.size() && text::is_emotional(tweet.tags[i]);
    if (lexicon.positive.contains(w)) {
      out[0] += 1;
      if (emotional) out[2] += 1;
    } else if (lexicon.negative.contains(w)) {
      out[1] += 1;
      if (emotional) out[3] += 1;
    }
  }
  return out;
}

std::array<double, 4> emoticon_features(const text::AnalyzedTweet& tweet, const SentimentLexicon& words,
                                        const EmoticonLexicon& emoticons) {
  bool pos_emo = false, neg_emo = false, pos_word = false, neg_word = false;
  for (const auto& token : tweet.tokens) {
    const auto lower = util::to_lower(token.surface);
    pos_emo |= emoticons.positive.contains(lower);
    neg_emo |= emoticons.negative.contains(lower);
    pos_word |= words.positive.contains(lower);
    neg_word |= words.negative.contains(lower);
  }
  const auto b = [](bool v) { return v ? 1.0 : 0.0; };
  return {b(pos_emo), b(neg_emo), b(pos_word && neg_word), b((pos_word && neg_emo) || (neg_word && pos_emo))};
}

std::array<double, 5> punctuation_features(std::string_view text) {
  std::array<double, 5> out{};
  std::size_t run = 0;
  bool all_upper = true;
  const auto close_word = [&] {
    if (run >= 2 && all_upper) out[3] += 1;
    run = 0;
    all_upper = true;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 3, "\xE2\x80\xA6") == 0) {
      close_word();
      out[1] += 3;
      i += 2;
      continue;
    }
    const char c = text[i];
    const bool upper = c >= 'A' && c <= 'Z';
    const bool lower = c >= 'a' && c <= 'z';
    if (upper || lower) {
      ++run;
      all_upper &= upper;
      continue;
    }
    close_word();
    if (c == '!') out[0] += 1;
    else if (c == '.') out[1] += 1;
    else if (c == '?') out[2] += 1;
    else if (c == '\'') out[4] += 1;
  }
  close_word();
  return out;
}

NumericFeatures numeric_features(const text::AnalyzedTweet& tweet, const FeatureConfig& config) {
  NumericFeatures out;
  out.unit_onehot.assign(config.unit_vocabulary.size(), 0.0);
  const auto* mention = tweet.first_mention();
  if (mention == nullptr) return out;
  out.value = mention->value;
  if (mention->unit) {
    const auto it = std::find(config.unit_vocabulary.begin(), config.unit_vocabulary.end(), *mention->unit);
    if (it != config.unit_vocabulary.end()) out.unit_onehot[static_cast<std::size_t>(it - config.unit_vocabulary.begin())] = 1.0;
  }
  return out;
}

std::vector<std::string> collect_unit_vocabulary(const std::vector<text::AnalyzedTweet>& tweets) {
  std::set<std::string> units;
  for (const auto& t : tweets) {
    if (const auto* m = t.first_mention(); m != nullptr && m->unit) units.insert(*m->unit);
  }
  return {units.begin(), units.end()};
}

std::vector<Segment> feature_layout(const FeatureConfig& config) {
  std::vector<Segment> layout;
  std::size_t offset = 0;
  const auto add = [&](bool enabled, Family f, std::size_t len) {
    if (!enabled) return;
    layout.push_back(Segment{f, offset, len});
    offset += len;
  };
  add(config.sentiment, Family::Sentiment, 4);
  add(config.emoticon, Family::Emoticon, 4);
  add(config.punctuation, Family::Punctuation, 5);
  add(config.number_value, Family::NumberValue, 1);
  add(config.unit_onehot, Family::UnitOneHot, config.unit_vocabulary.size());
  add(config.tweet_embedding, Family::TweetEmbedding, config.embedding_dim);
  return layout;
}

FeatureVector assemble_features(const text::AnalyzedTweet& tweet, const FeatureConfig& config,
                                const embeddings::EmbeddingTable* table, const SentimentLexicon& words,
                                const EmoticonLexicon& emoticons) {
  config.validate();
  if (config.tweet_embedding) {
    if (table == nullptr) throw UsageError("tweet_embedding feature needs an embedding table");
    if (table->dim() != config.embedding_dim) {
      throw UsageError("embedding dimension mismatch: config d=" + std::to_string(config.embedding_dim) +
                       ", table d=" + std::to_string(table->dim()));
    }
  }
  FeatureVector fv;
  fv.layout = feature_layout(config);
  const auto append = [&](const auto& values) { fv.values.insert(fv.values.end(), values.begin(), values.end()); };
  if (config.sentiment) append(sentiment_features(tweet, words));
  if (config.emoticon) append(emoticon_features(tweet, words, emoticons));
  if (config.punctuation) append(punctuation_features(tweet.surface.empty() ? tweet.text : tweet.surface));
  if (config.number_value || config.unit_onehot) {
    const auto numeric = numeric_features(tweet, config);
    if (config.number_value) fv.values.push_back(numeric.value);
    if (config.unit_onehot) append(numeric.unit_onehot);
  }
  if (config.tweet_embedding) append(embeddings::compose_vector(tweet.words(), *table).values);
  return fv;
}

std::vector<std::string> column_names(const FeatureConfig& config) {
  std::vector<std::string> names;
  if (config.sentiment) {
    for (auto n : {"pos", "neg", "emotional_pos", "emotional_neg"}) names.push_back(std::string("sentiment.") + n);
  }
  if (config.emoticon) {
    for (auto n : {"pos", "neg", "word_contrast", "word_emoticon_contrast"}) names.push_back(std::string("emoticon.") + n);
  }
  if (config.punctuation) {
    for (auto n : {"exclamation", "dot", "question", "caps_word", "quote"}) names.push_back(std::string("punctuation.") + n);
  }
  if (config.number_value) names.emplace_back("number_value");
  if (config.unit_onehot) {
    for (const auto& u : config.unit_vocabulary) names.push_back("unit." + u);
  }
  if (config.tweet_embedding) {
    for (std::size_t i = 0; i < config.embedding_dim; ++i) names.push_back("embedding." + std::to_string(i));
  }
  return names;
}

std::string to_csv(const FeatureConfig& config, const std::vector<FeatureVector>& rows, const std::vector<int>* labels) {
  std::ostringstream out;
  out.precision(17);
  const auto names = column_names(config);
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  if (labels != nullptr) out << ",label";
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < rows[r].values.size(); ++i) out << (i ? "," : "") << rows[r].values[i];
    if (labels != nullptr) out << ',' << (*labels)[r];
    out << '\n';
  }
  return out.str();
}

}  // namespace numsarc::features
