#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "numsarc/corpus.hpp"
#include "numsarc/error.hpp"
#include "numsarc/rng.hpp"
#include "numsarc/text.hpp"

using namespace numsarc;
using namespace numsarc::corpus;

namespace {

std::string norm(const std::string& s) { return normalize_tweet(RawTweet{"x", s, {}}).value_or("<empty>"); }

std::vector<text::Token> toks(std::initializer_list<const char*> words) {
  std::vector<text::Token> out;
  for (const auto* w : words) out.push_back({w, out.size()});
  return out;
}

std::vector<LabeledTweet> make_corpus(std::size_t pos_numeric, std::size_t pos_plain, std::size_t neg) {
  std::vector<LabeledTweet> out;
  std::size_t id = 0;
  const auto add = [&](std::string text, int label) {
    out.push_back({"t" + std::to_string(id++), text, text, label});
  };
  for (std::size_t i = 0; i < pos_numeric; ++i) add("up at " + std::to_string(i) + " am", 1);
  for (std::size_t i = 0; i < pos_plain; ++i) add("so fun number w" + std::to_string(i), 1);
  for (std::size_t i = 0; i < neg; ++i) add("nice day v" + std::to_string(i), 0);
  return out;
}

}  // namespace

TEST_CASE("normalize_tweet examples") {
  CHECK(norm("Love waking up at 4 am #sarcasm") == "love waking up at 4 am");
  CHECK(norm("see http://t.co/ab @bob hi") == "see hi");
  CHECK(norm("\xCE\x9A\xCE\xB1\xCE\xBB\xCE\xB7\xCE\xBC\xCE\xAD\xCF\x81\xCE\xB1 hello") == "hello");
  CHECK(norm("great #NotSarcastic #weekend   vibes") == "great weekend vibes");
  CHECK(norm("RT @x: fun times") == "fun times");
  CHECK(norm("#sarcasm http://x.y") == "<empty>");
  CHECK(normalize_tweet(RawTweet{"x", "WOW... Really #Sarcasm", {}}, label_hashtags(), true) == "WOW... Really");
}

TEST_CASE("normalize_tweet is idempotent and removes label hashtags") {
  const std::vector<std::string> raws{"Love waking up at 4 am #sarcasm",
                                      "#BeingSarcastic 2 hours of meetings, yay www.x.com",
                                      "fine day #notsarcastic #nonsarcasm @a",
                                      "caf\xC3\xA9 at 8:30 #sarcastic#fun",
                                      "rt rt  so   much   space #Sarcasm!"};
  for (const auto& raw : raws) {
    const auto once = normalize_tweet(RawTweet{"x", raw, {}});
    REQUIRE(once.has_value());
    CHECK(normalize_tweet(RawTweet{"x", *once, {}}) == once);
    for (const auto& tag : label_hashtags()) CHECK(once->find(tag) == std::string::npos);
    CHECK(once->find('@') == std::string::npos);
    CHECK(once->find("http") == std::string::npos);
    for (unsigned char c : *once) CHECK(c < 0x80);
  }
}

TEST_CASE("label_by_hashtag") {
  CHECK(label_by_hashtag("ugh #sarcasm") == 1);
  CHECK(label_by_hashtag("fine day #notsarcastic") == 0);
  CHECK_FALSE(label_by_hashtag("fine day").has_value());
  CHECK(label_by_hashtag("ugh #BeingSarcastic") == 1);
  CHECK_FALSE(label_by_hashtag("#sarcasm #nonsarcasm").has_value());
  CHECK_FALSE(label_by_hashtag("#sarcasmo").has_value());
}

TEST_CASE("is_numeric_tweet") {
  CHECK(is_numeric_tweet(toks({"having", "2", "hours"})));
  CHECK_FALSE(is_numeric_tweet(toks({"model34d", "is", "great"})));
  CHECK_FALSE(is_numeric_tweet(toks({"no", "digits"})));
  CHECK_FALSE(is_numeric_tweet(toks({"4s", "<3"})));
  CHECK(is_numeric_tweet(toks({"at", "8:30"})));
}

TEST_CASE("numeric_fraction") {
  std::vector<LabeledTweet> corpus;
  for (int i = 0; i < 100000; ++i) {
    const std::string text = i < 11488 ? "having 2 hours" : "no digits here";
    corpus.push_back({std::to_string(i), text, text, 0});
  }
  CHECK(numeric_fraction(corpus) == doctest::Approx(0.11488).epsilon(1e-12));
  CHECK(numeric_fraction(make_corpus(5, 0, 0)) == 1.0);
  CHECK(numeric_fraction(make_corpus(0, 3, 4)) == 0.0);
  CHECK_THROWS_AS(numeric_fraction({}), DataError);
}

TEST_CASE("numeric_fraction equals a brute-force count") {
  Rng rng(5);
  const std::vector<std::string> words{"a", "4", "4s", "8:30", "x1", "fun", "2.5", "<3"};
  std::vector<LabeledTweet> corpus;
  std::size_t count = 0;
  for (int i = 0; i < 300; ++i) {
    std::string text;
    bool numeric = false;
    for (std::size_t j = 0, n = 1 + rng.below(4); j < n; ++j) {
      const auto& w = words[rng.below(words.size())];
      numeric |= text::is_numeric_token(w);
      text += (j ? " " : "") + w;
    }
    count += numeric;
    corpus.push_back({std::to_string(i), text, text, 0});
  }
  CHECK(numeric_fraction(corpus) == static_cast<double>(count) / 300.0);
}

TEST_CASE("ingest labels, dedups and drops") {
  std::vector<RawTweet> raw{{"1", "Love waking up at 4 am #sarcasm", {}},
                            {"2", "love waking up at 4 AM #sarcastic", {}},
                            {"3", "plain text", {}},
                            {"4", "#sarcasm @only", {}},
                            {"5", "fine day #notsarcastic", {}},
                            {"6", "already labeled", 1}};
  const auto report = ingest(raw);
  REQUIRE(report.tweets.size() == 3);
  CHECK(report.duplicates == 1);
  CHECK(report.unlabeled == 1);
  CHECK(report.empty == 1);
  CHECK(report.tweets[0].label == 1);
  CHECK(report.tweets[1].label == 0);
  CHECK(report.tweets[2].label == 1);
  raw.push_back({"1", "dup id #sarcasm", {}});
  CHECK_THROWS_AS(ingest(raw), DataError);
}

TEST_CASE("dataset presets") {
  const auto d2 = DatasetPreset::preset("d2");
  CHECK(d2.pos_count == 8681);
  CHECK(d2.neg_count == 8681);
  CHECK(d2.numeric_only_positive);
  const auto d3 = DatasetPreset::preset("D3");
  CHECK(d3.pos_count == 8681);
  CHECK(d3.neg_count == 42107);
  const auto test = DatasetPreset::preset("test");
  CHECK(test.pos_count == 1843);
  CHECK(test.neg_count == 8317);
  CHECK_FALSE(DatasetPreset::preset("d1").numeric_only_positive);
  CHECK_THROWS_AS(DatasetPreset::preset("d9"), UsageError);
}

TEST_CASE("build_dataset samples deterministically with numeric positives") {
  const auto corpus = make_corpus(30, 20, 40);
  DatasetPreset preset{DatasetName::Custom, 10, 15, true};
  const auto a = build_dataset(corpus, preset, 7);
  const auto b = build_dataset(corpus, preset, 7);
  CHECK(to_jsonl(a) == to_jsonl(b));
  std::size_t pos = 0, neg = 0;
  for (const auto& t : a) {
    if (t.label == 1) {
      ++pos;
      CHECK(is_numeric_tweet(text::tokenize(t.text)));
    } else {
      ++neg;
    }
  }
  CHECK(pos == 10);
  CHECK(neg == 15);
  CHECK(to_jsonl(build_dataset(corpus, preset, 8)) != to_jsonl(a));
}

TEST_CASE("build_dataset names the deficient class") {
  const auto corpus = make_corpus(5, 20, 40);
  try {
    build_dataset(corpus, DatasetPreset{DatasetName::Custom, 10, 5, true}, 1);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("sarcastic") != std::string::npos);
  }
  try {
    build_dataset(corpus, DatasetPreset{DatasetName::Custom, 5, 50, true}, 1);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("non-sarcastic") != std::string::npos);
  }
}

TEST_CASE("stratified_kfold") {
  SUBCASE("exact divisibility") {
    const auto data = make_corpus(5, 0, 5);
    const auto folds = stratified_kfold(data, 5, 11);
    std::map<std::size_t, std::pair<int, int>> per_fold;
    for (std::size_t i = 0; i < data.size(); ++i) {
      auto& c = per_fold[folds.fold_of(data[i].id)];
      (data[i].label ? c.first : c.second) += 1;
    }
    CHECK(per_fold.size() == 5);
    for (const auto& [fold, c] : per_fold) {
      CHECK(c.first == 1);
      CHECK(c.second == 1);
    }
  }
  SUBCASE("determinism, partition and balance") {
    const auto data = make_corpus(23, 0, 61);
    const auto a = stratified_kfold(data, 5, 99);
    const auto b = stratified_kfold(data, 5, 99);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.ids.size() == data.size());
    std::set<std::string> seen(a.ids.begin(), a.ids.end());
    CHECK(seen.size() == data.size());
    std::vector<int> pos(5), neg(5);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto f = a.fold_of(data[i].id);
      REQUIRE(f < 5);
      (data[i].label ? pos[f] : neg[f]) += 1;
    }
    for (int f = 0; f < 5; ++f) {
      CHECK(std::abs(pos[f] - 23.0 / 5) <= 1.0);
      CHECK(std::abs(neg[f] - 61.0 / 5) <= 1.0);
      CHECK(std::abs(pos[f] + neg[f] - 84.0 / 5) <= 1.0);
    }
    CHECK(FoldAssignment::from_json(a.to_json()).to_json() == a.to_json());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(stratified_kfold(make_corpus(3, 0, 10), 5, 1), DataError);
    CHECK_THROWS_AS(stratified_kfold(make_corpus(10, 0, 10), 1, 1), UsageError);
  }
}

TEST_CASE("jsonl round trip") {
  const auto raw = parse_raw_jsonl("{\"id\":\"a\",\"text\":\"hi 2 hours\",\"label\":1}\n\n{\"id\":\"b\",\"text\":\"x\"}\n");
  REQUIRE(raw.size() == 2);
  CHECK(raw[0].label == 1);
  CHECK_FALSE(raw[1].label.has_value());
  CHECK_THROWS_AS(parse_raw_jsonl("{\"id\":\"a\"}\n"), DataError);
  CHECK_THROWS_AS(parse_raw_jsonl("not json\n"), DataError);
  CHECK_THROWS_AS(parse_raw_jsonl("{\"id\":\"a\",\"text\":\"t\",\"label\":3}\n"), DataError);
}
