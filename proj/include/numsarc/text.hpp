#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace numsarc::text {

struct Token {
  std::string surface;
  std::size_t position = 0;

  bool operator==(const Token&) const = default;
};

enum class Tag {
  NN, NNS, NNP, JJ, JJR, JJS, RB, RBR, RBS,
  VB, VBD, VBG, VBN, VBP, VBZ, CD, IN, DT, PRP, UH, SYM, OTHER
};

std::string_view tag_name(Tag tag);
/// Throws UsageError for names outside the tag alphabet.
Tag parse_tag(std::string_view name);

bool is_noun(Tag tag);
bool is_adjective(Tag tag);
/// JJ*, RB*, VB* tags: the "highly emotional" word classes.
bool is_emotional(Tag tag);

struct TaggedToken {
  Token token;
  Tag tag = Tag::NN;
};

struct NumericMention {
  double value = 0.0;
  std::optional<std::string> unit;      // canonical, used for matching
  std::optional<std::string> raw_unit;  // surface form as written
  std::size_t position = 0;

  bool operator==(const NumericMention&) const = default;
};

struct Diagnostic {
  std::size_t position = 0;
  std::string message;
};

/// Digits with at most one '.' or one ':' separator between digit runs ("2", "3.5", "8:30").
bool is_numeric_token(std::string_view surface);

/// Emoticons are kept whole by the tokenizer and tagged SYM.
bool is_emoticon(std::string_view surface);

bool is_punctuation(std::string_view surface);

/// Whitespace tokenization with punctuation peeling and in-word hyphen removal.
std::vector<Token> tokenize(std::string_view text);

/// word -> tag table, loaded from "word<TAB>TAG" lines.
class Lexicon {
 public:
  static Lexicon from_text(std::string_view content);
  static Lexicon from_file(const std::filesystem::path& path);
  static const Lexicon& builtin();

  std::optional<Tag> find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, Tag> entries_;
};

/// alias -> canonical unit table; aliases mapped to "-" are stop words (never units).
class UnitTable {
 public:
  static UnitTable from_text(std::string_view content);
  static UnitTable from_file(const std::filesystem::path& path);
  static const UnitTable& builtin();

  std::optional<std::string> normalize(std::string_view raw_unit) const;

 private:
  std::unordered_map<std::string, std::string> aliases_;
  std::unordered_set<std::string> stop_words_;
};

/// Numeric tokens are CD; otherwise lexicon, suffix rules, then NN.
std::vector<TaggedToken> pos_tag(const std::vector<Token>& tokens,
                                 const Lexicon& lexicon = Lexicon::builtin());

/// Flat list of content words from JJ* (NN|NNS|NNP)+ chunks plus adjectives
/// directly following a noun run.
std::vector<std::string> extract_noun_phrases(const std::vector<TaggedToken>& tagged);

struct MentionExtraction {
  std::vector<NumericMention> mentions;
  std::vector<Diagnostic> diagnostics;
};

MentionExtraction extract_numeric_mentions(const std::vector<TaggedToken>& tagged,
                                           const UnitTable& units = UnitTable::builtin());

std::optional<std::string> normalize_unit(std::string_view raw_unit,
                                          const UnitTable& units = UnitTable::builtin());

/// Parses "2", "3.5" or clock "8:30" (-> 8.5). nullopt when unparseable.
std::optional<double> parse_numeric_value(std::string_view surface);

struct AnalyzedTweet {
  std::string id;
  std::string text;     // normalized (lowercased)
  std::string surface;  // normalized with original case, for punctuation features
  std::vector<Token> tokens;
  std::vector<Tag> tags;
  std::vector<std::string> noun_phrase_words;
  std::vector<NumericMention> mentions;
  std::vector<Diagnostic> diagnostics;
  std::optional<int> label;

  std::vector<std::string> words() const;
  const NumericMention* first_mention() const {
    return mentions.empty() ? nullptr : &mentions.front();
  }
};

/// Runs the whole text pipeline with a fixed lexicon and unit table.
class Analyzer {
 public:
  Analyzer();
  Analyzer(Lexicon lexicon, UnitTable units);

  AnalyzedTweet analyze(std::string id, std::string_view text, std::optional<int> label = std::nullopt,
                        std::string_view surface = {}) const;

  const Lexicon& lexicon() const { return lexicon_; }
  const UnitTable& units() const { return units_; }

 private:
  Lexicon lexicon_;
  UnitTable units_;
};

}  // namespace numsarc::text
