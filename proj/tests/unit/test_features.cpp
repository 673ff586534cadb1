#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "numsarc/corpus.hpp"
#include "numsarc/embeddings.hpp"
#include "numsarc/error.hpp"
#include "numsarc/features.hpp"
#include "numsarc/rng.hpp"
#include "numsarc/text.hpp"

using namespace numsarc;
using namespace numsarc::features;

namespace {

text::AnalyzedTweet analyze(const std::string& s) {
  static const text::Analyzer a;
  return a.analyze("id", s);
}

text::AnalyzedTweet analyze_raw(const std::string& raw) {
  static const text::Analyzer a;
  const corpus::RawTweet r{"id", raw, {}};
  const auto lower = corpus::normalize_tweet(r).value_or("");
  const auto surface = corpus::normalize_tweet(r, corpus::label_hashtags(), true).value_or("");
  return a.analyze("id", lower, std::nullopt, surface);
}

using A4 = std::array<double, 4>;
using A5 = std::array<double, 5>;

}  // namespace

TEST_CASE("sentiment features") {
  CHECK(sentiment_features(analyze("awesome")) == A4{1, 0, 1, 0});
  CHECK(sentiment_features(analyze("sunshine")) == A4{1, 0, 0, 0});
  CHECK(sentiment_features(analyze("the table")) == A4{0, 0, 0, 0});
  const auto lex = SentimentLexicon::from_text("glad\n", "sad\n");
  CHECK(sentiment_features(analyze("glad sad sad"), lex) == A4{1, 2, 1, 2});
  CHECK_THROWS_AS(SentimentLexicon::from_text("x\n", "x\n"), DataError);
}

TEST_CASE("emoticon features") {
  CHECK(emoticon_features(analyze("great :(")) == A4{0, 1, 0, 1});
  CHECK(emoticon_features(analyze("good bad day"))[2] == 1.0);
  CHECK(emoticon_features(analyze(":) :)")) == A4{1, 0, 0, 0});
  CHECK(emoticon_features(analyze("terrible :)")) == A4{1, 0, 0, 1});
  CHECK_THROWS_AS(EmoticonLexicon::from_text(":)\n", ":)\n"), DataError);
}

TEST_CASE("punctuation features") {
  CHECK(punctuation_features("WOW... really?!") == A5{1, 3, 1, 1, 0});
  CHECK(punctuation_features("it's 'fine'")[4] == 3.0);
  CHECK(punctuation_features("") == A5{0, 0, 0, 0, 0});
  CHECK(punctuation_features("wait\xE2\x80\xA6 I am OK") == A5{0, 3, 0, 1, 0});
  CHECK(analyze_raw("SO great... #sarcasm").surface == "SO great...");
  const auto t = analyze_raw("SO great... #sarcasm");
  FeatureConfig c;
  c.sentiment = c.emoticon = c.number_value = c.unit_onehot = false;
  CHECK(assemble_features(t, c).values == std::vector<double>{0, 3, 0, 1, 0});
}

TEST_CASE("numeric features") {
  FeatureConfig c;
  c.unit_vocabulary = {"minutes", "hours", "am"};
  const auto hours = numeric_features(analyze("battery back-up of 2 hours"), c);
  CHECK(hours.value == 2.0);
  CHECK(hours.unit_onehot == std::vector<double>{0, 1, 0});
  const auto unitless = numeric_features(analyze("waking up at 545"), c);
  CHECK(unitless.value == 545.0);
  CHECK(unitless.unit_onehot == std::vector<double>{0, 0, 0});
  const auto none = numeric_features(analyze("no numbers"), c);
  CHECK(none.value == 0.0);
  CHECK(none.unit_onehot == std::vector<double>{0, 0, 0});
  const auto unseen = numeric_features(analyze("3 parsecs"), c);
  CHECK(unseen.unit_onehot == std::vector<double>{0, 0, 0});
  const auto first = numeric_features(analyze("8:30 am and 2 hours"), c);
  CHECK(first.value == 8.5);
  CHECK(first.unit_onehot == std::vector<double>{0, 0, 1});
}

TEST_CASE("assemble_features lengths") {
  FeatureConfig sp;
  sp.emoticon = sp.number_value = sp.unit_onehot = false;
  CHECK(assemble_features(analyze("fun!"), sp).values.size() == 9);

  embeddings::EmbeddingTable t300(300);
  t300.add("fun", std::vector<double>(300, 0.5));
  FeatureConfig emb;
  emb.sentiment = emb.emoticon = emb.punctuation = emb.number_value = emb.unit_onehot = false;
  emb.tweet_embedding = true;
  emb.embedding_dim = 300;
  const auto e = assemble_features(analyze("fun times"), emb, &t300);
  CHECK(e.values.size() == 300);
  CHECK(e.values[7] == 0.5);

  embeddings::EmbeddingTable t50(50);
  t50.add("fun", std::vector<double>(50, 1.0));
  FeatureConfig full;
  full.tweet_embedding = true;
  full.embedding_dim = 50;
  full.unit_vocabulary = {"minutes", "hours", "am"};
  CHECK(assemble_features(analyze("fun 2 hours"), full, &t50).values.size() == 67);

  CHECK_THROWS_AS(assemble_features(analyze("fun"), emb, &t50), UsageError);
  CHECK_THROWS_AS(assemble_features(analyze("fun"), emb), UsageError);
  FeatureConfig nothing;
  nothing.sentiment = nothing.emoticon = nothing.punctuation = nothing.number_value = nothing.unit_onehot = false;
  CHECK_THROWS_AS(assemble_features(analyze("fun"), nothing), UsageError);
}

TEST_CASE("feature vector properties over random configs and tweets") {
  const std::vector<std::string> texts{"WOW... awesome 2 hours :(", "i love waking up at 4 am",
                                       "so 'happy' to wait 45 mins?!", "great bad :) terrible",
                                       "nothing here", "8:30 am meetings are the best way"};
  embeddings::EmbeddingTable table(4);
  Rng vr(1);
  for (const auto* w : {"love", "wait", "meetings", "way", "great", "awesome"}) {
    std::vector<double> v(4);
    for (auto& x : v) x = vr.normal();
    table.add(w, v);
  }
  Rng rng(77);
  for (int trial = 0; trial < 64; ++trial) {
    FeatureConfig c;
    c.sentiment = rng.below(2);
    c.emoticon = rng.below(2);
    c.punctuation = rng.below(2);
    c.number_value = rng.below(2);
    c.unit_onehot = rng.below(2);
    c.tweet_embedding = rng.below(2);
    c.embedding_dim = 4;
    c.unit_vocabulary = {"am", "hours", "minutes"};
    if (!(c.sentiment || c.emoticon || c.punctuation || c.number_value || c.unit_onehot || c.tweet_embedding)) continue;
    std::vector<Segment> first_layout;
    for (const auto& s : texts) {
      const auto t = analyze(s);
      const auto fv = assemble_features(t, c, &table);
      const auto again = assemble_features(t, c, &table);
      CHECK(fv.values == again.values);
      if (first_layout.empty()) first_layout = fv.layout;
      REQUIRE(fv.layout.size() == first_layout.size());
      std::size_t offset = 0;
      for (std::size_t i = 0; i < fv.layout.size(); ++i) {
        CHECK(fv.layout[i].family == first_layout[i].family);
        CHECK(fv.layout[i].offset == offset);
        offset += fv.layout[i].length;
      }
      CHECK(offset == fv.values.size());
      for (const auto& seg : fv.layout) {
        for (std::size_t i = seg.offset; i < seg.offset + seg.length; ++i) {
          const double x = fv.values[i];
          switch (seg.family) {
            case Family::Sentiment:
            case Family::Punctuation:
              CHECK(x >= 0);
              CHECK(x == std::floor(x));
              break;
            case Family::Emoticon:
            case Family::UnitOneHot:
              CHECK((x == 0.0 || x == 1.0));
              break;
            default:
              break;
          }
        }
        if (seg.family == Family::UnitOneHot) {
          double sum = 0;
          for (std::size_t i = seg.offset; i < seg.offset + seg.length; ++i) sum += fv.values[i];
          CHECK(sum <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("unit vocabulary and csv export") {
  const std::vector<text::AnalyzedTweet> train{analyze("2 hours"), analyze("4 am"), analyze("3 hours"), analyze("x")};
  CHECK(collect_unit_vocabulary(train) == std::vector<std::string>{"am", "hours"});
  FeatureConfig c;
  c.emoticon = c.sentiment = false;
  c.unit_vocabulary = collect_unit_vocabulary(train);
  std::vector<FeatureVector> rows;
  for (const auto& t : train) rows.push_back(assemble_features(t, c));
  const std::vector<int> labels{1, 0, 1, 0};
  const auto csv = to_csv(c, rows, &labels);
  CHECK(csv.rfind("punctuation.exclamation,punctuation.dot,punctuation.question,punctuation.caps_word,"
                  "punctuation.quote,number_value,unit.am,unit.hours,label\n",
                  0) == 0);
  CHECK(csv.find("0,0,0,0,0,2,0,1,1\n") != std::string::npos);
  CHECK(FeatureConfig::from_json(c.to_json()).to_json() == c.to_json());
}
