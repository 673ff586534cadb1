#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "numsarc/error.hpp"
#include "numsarc/rng.hpp"
#include "numsarc/text.hpp"

using namespace numsarc;
using namespace numsarc::text;

namespace {

std::vector<std::string> surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

std::vector<std::string> noun_phrases(const std::string& s) {
  return extract_noun_phrases(pos_tag(tokenize(s)));
}

Tag tag_of(const std::string& word) { return pos_tag(tokenize(word)).at(0).tag; }

}  // namespace

TEST_CASE("tokenize splits punctuation and keeps numbers and emoticons whole") {
  CHECK(surfaces(tokenize("8:30 am meetings are the best")) ==
        std::vector<std::string>{"8:30", "am", "meetings", "are", "the", "best"});
  CHECK(surfaces(tokenize("fun!")) == std::vector<std::string>{"fun", "!"});
  CHECK(tokenize("").empty());
  CHECK(surfaces(tokenize("great :( really :)")) == std::vector<std::string>{"great", ":(", "really", ":)"});
  CHECK(surfaces(tokenize("it costs 34.04.")) == std::vector<std::string>{"it", "costs", "34.04", "."});
  CHECK(surfaces(tokenize("battery back-up")) == std::vector<std::string>{"battery", "backup"});
}

TEST_CASE("token positions are strictly increasing") {
  const auto tokens = tokenize("wow!! so fun... at 4 am, right?");
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    CHECK(tokens[i].position == i);
    CHECK_FALSE(tokens[i].surface.empty());
  }
}

TEST_CASE("pos_tag basics") {
  CHECK(tag_of("2") == Tag::CD);
  CHECK(tag_of("hours") == Tag::NNS);
  CHECK(tag_of("quickly") == Tag::RB);
  CHECK(tag_of("zorbling") == Tag::VBG);
  CHECK(tag_of("awesome") == Tag::JJ);
  CHECK(tag_of(":)") == Tag::SYM);
}

TEST_CASE("pos_tag tags every numeric-pattern token CD") {
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    std::string s = std::to_string(rng.below(100000));
    const auto form = rng.below(3);
    if (form == 1) s += "." + std::to_string(rng.below(1000));
    if (form == 2) s += ":" + std::to_string(10 + rng.below(50));
    REQUIRE(is_numeric_token(s));
    std::vector<Token> tokens{{"at", 0}, {s, 1}, {"hours", 2}};
    CHECK(pos_tag(tokens)[1].tag == Tag::CD);
  }
  CHECK_FALSE(is_numeric_token("4s"));
  CHECK_FALSE(is_numeric_token("model34d"));
  CHECK_FALSE(is_numeric_token("1.2.3"));
  CHECK_FALSE(is_numeric_token("<3"));
}

TEST_CASE("noun phrase golden lists") {
  CHECK(noun_phrases("this phone has an awesome battery back-up of 2 hours") ==
        std::vector<std::string>{"phone", "awesome", "battery", "backup", "hours"});
  CHECK(noun_phrases("8:30 am meetings are the best way to start birthday weekend") ==
        std::vector<std::string>{"meetings", "way", "birthday", "weekend"});
  CHECK(noun_phrases("go away now").empty());
}

TEST_CASE("numeric mentions") {
  SUBCASE("battery example") {
    const auto m = extract_numeric_mentions(pos_tag(tokenize("this phone has an awesome battery back-up of 2 hours")));
    REQUIRE(m.mentions.size() == 1);
    CHECK(m.mentions[0].value == 2.0);
    CHECK(m.mentions[0].unit == "hours");
  }
  SUBCASE("unitless clock typo") {
    const auto m = extract_numeric_mentions(pos_tag(tokenize("i love waking up at 545")));
    REQUIRE(m.mentions.size() == 1);
    CHECK(m.mentions[0].value == 545.0);
    CHECK_FALSE(m.mentions[0].unit.has_value());
  }
  SUBCASE("multiple numbers with a stop-word unit") {
    const auto m =
        extract_numeric_mentions(pos_tag(tokenize("$34.04 for a 10 mile trip that takes 19 minutes")));
    REQUIRE(m.mentions.size() == 3);
    CHECK(m.mentions[0].value == doctest::Approx(34.04));
    CHECK(m.mentions[0].raw_unit == "for");
    CHECK_FALSE(m.mentions[0].unit.has_value());
    CHECK(m.mentions[1].value == 10.0);
    CHECK(m.mentions[1].unit == "miles");
    CHECK(m.mentions[1].raw_unit == "mile");
    CHECK(m.mentions[2].value == 19.0);
    CHECK(m.mentions[2].unit == "minutes");
  }
  SUBCASE("clock values are decimal hours") {
    const auto m = extract_numeric_mentions(pos_tag(tokenize("8:30 am meetings")));
    REQUIRE(m.mentions.size() == 1);
    CHECK(m.mentions[0].value == 8.5);
    CHECK(m.mentions[0].unit == "am");
  }
  SUBCASE("number followed by number or punctuation has no unit") {
    const auto m = extract_numeric_mentions(pos_tag(tokenize("scores 3 4 !")));
    REQUIRE(m.mentions.size() == 2);
    CHECK_FALSE(m.mentions[0].unit.has_value());
    CHECK_FALSE(m.mentions[1].unit.has_value());
  }
}

TEST_CASE("unparseable CD surfaces produce diagnostics") {
  std::vector<TaggedToken> tagged{{{"7:99", 0}, Tag::CD}, {{"5", 1}, Tag::CD}, {{"days", 2}, Tag::NNS}};
  const auto m = extract_numeric_mentions(tagged);
  CHECK(m.mentions.size() == 1);
  CHECK(m.diagnostics.size() == 1);
  CHECK(m.diagnostics[0].position == 0);
}

TEST_CASE("mentions plus diagnostics equal CD tokens") {
  const std::vector<std::string> texts{"at 4 am", "2 hours and 30 mins", "no numbers here", "8:30 pm or 9:75 pm",
                                       "i love waking up at 545", "3.5 4.5 5.5"};
  for (const auto& t : texts) {
    const auto tagged = pos_tag(tokenize(t));
    std::size_t cd = 0;
    for (const auto& tt : tagged) cd += tt.tag == Tag::CD;
    const auto m = extract_numeric_mentions(tagged);
    CHECK(m.mentions.size() + m.diagnostics.size() == cd);
    for (std::size_t i = 1; i < m.mentions.size(); ++i) CHECK(m.mentions[i - 1].position < m.mentions[i].position);
  }
}

TEST_CASE("normalize_unit") {
  CHECK(normalize_unit("min") == "minutes");
  CHECK(normalize_unit("hours") == "hours");
  CHECK_FALSE(normalize_unit("for").has_value());
  CHECK(normalize_unit("HR") == "hours");
  CHECK(normalize_unit("a.m.") == "am");
  CHECK(normalize_unit("widgets") == "widgets");
  for (const auto* raw : {"min", "mins", "minute", "hr", "hrs", "hour", "sec", "secs", "second", "day", "yr", "yrs",
                          "year", "am", "a.m.", "pm", "p.m.", "degree", "mile", "bananas"}) {
    const auto once = normalize_unit(raw);
    REQUIRE(once.has_value());
    CHECK(normalize_unit(*once) == once);
  }
  for (const auto* stop : {"for", "of", "to", "in", "at", "and", "or"}) CHECK_FALSE(normalize_unit(stop).has_value());
}

TEST_CASE("tokenize of a space-joined token list reproduces it") {
  const std::vector<std::string> vocab{"love", "4", "am", "8:30", "!", "?", ".", ":)", ":(", "hours", "2.5", "meetings"};
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> words;
    const auto n = 1 + rng.below(8);
    std::string joined;
    for (std::size_t i = 0; i < n; ++i) {
      words.push_back(vocab[rng.below(vocab.size())]);
      joined += (i ? " " : "") + words.back();
    }
    CHECK(surfaces(tokenize(joined)) == words);
  }
}

TEST_CASE("lexicon and unit table file formats") {
  const auto lex = Lexicon::from_text("# comment\nfoo\tJJ\nbar\tNNS\n");
  CHECK(lex.find("foo") == Tag::JJ);
  CHECK(lex.find("bar") == Tag::NNS);
  CHECK_FALSE(lex.find("baz").has_value());
  CHECK_THROWS_AS(Lexicon::from_text("foo JJ\n"), DataError);
  CHECK_THROWS_AS(Lexicon::from_text("foo\tXYZ\n"), DataError);
  const auto units = UnitTable::from_text("hr\thours\nfor\t-\n");
  CHECK(units.normalize("hr") == "hours");
  CHECK_FALSE(units.normalize("for").has_value());
  CHECK(units.normalize("mins") == "mins");
}

TEST_CASE("analyzer assembles an analyzed tweet") {
  const Analyzer analyzer;
  const auto t = analyzer.analyze("x1", "this phone has an awesome battery back-up of 2 hours", 1);
  CHECK(t.id == "x1");
  CHECK(t.label == 1);
  CHECK(t.tokens.size() == t.tags.size());
  CHECK(t.noun_phrase_words == std::vector<std::string>{"phone", "awesome", "battery", "backup", "hours"});
  REQUIRE(t.first_mention() != nullptr);
  CHECK(t.first_mention()->unit == "hours");
  for (const auto& w : t.noun_phrase_words) {
    bool found = false;
    for (const auto& tok : t.tokens) found |= tok.surface == w;
    CHECK(found);
  }
}
