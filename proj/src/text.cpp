#include "numsarc/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "numsarc/error.hpp"
#include "numsarc/resources.hpp"
#include "numsarc/util.hpp"

namespace numsarc::text {

namespace {

constexpr std::array<std::pair<Tag, std::string_view>, 22> kTagNames{{
    {Tag::NN, "NN"},   {Tag::NNS, "NNS"}, {Tag::NNP, "NNP"}, {Tag::JJ, "JJ"},
    {Tag::JJR, "JJR"}, {Tag::JJS, "JJS"}, {Tag::RB, "RB"},   {Tag::RBR, "RBR"},
    {Tag::RBS, "RBS"}, {Tag::VB, "VB"},   {Tag::VBD, "VBD"}, {Tag::VBG, "VBG"},
    {Tag::VBN, "VBN"}, {Tag::VBP, "VBP"}, {Tag::VBZ, "VBZ"}, {Tag::CD, "CD"},
    {Tag::IN, "IN"},   {Tag::DT, "DT"},   {Tag::PRP, "PRP"}, {Tag::UH, "UH"},
    {Tag::SYM, "SYM"}, {Tag::OTHER, "OTHER"},
}};

constexpr std::string_view kLeadingPeel = "\"([{'$";
constexpr std::string_view kTrailingPeel = ".,!?;:)\"]}'";

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

const std::unordered_set<std::string>& emoticon_set() {
  static const std::unordered_set<std::string> set = [] {
    std::unordered_set<std::string> out;
    for (auto content : {resources::positive_emoticons(), resources::negative_emoticons()}) {
      for (auto& line : util::content_lines(content)) out.insert(util::to_lower(line));
    }
    return out;
  }();
  return set;
}

bool matches_emoticon_pattern(std::string_view s) {
  constexpr std::string_view eyes = ":;=";
  constexpr std::string_view noses = "-'";
  constexpr std::string_view mouths = ")(][dDpP/\\|*oO3";
  if (s.size() < 2) return false;
  // eyes [nose] mouth+
  if (eyes.find(s[0]) != std::string_view::npos) {
    std::size_t i = 1;
    if (noses.find(s[i]) != std::string_view::npos) ++i;
    if (i >= s.size()) return false;
    for (; i < s.size(); ++i) {
      if (mouths.find(s[i]) == std::string_view::npos) return false;
    }
    return true;
  }
  // reversed: mouth [nose] eyes, only for bracket mouths, e.g. "(:" or "):"
  if ((s[0] == '(' || s[0] == ')') && s.size() <= 3) {
    std::size_t i = 1;
    if (s.size() == 3 && noses.find(s[i]) != std::string_view::npos) ++i;
    return i == s.size() - 1 && eyes.find(s[i]) != std::string_view::npos;
  }
  return false;
}

std::string strip_inner_hyphens(std::string core) {
  if (core.find('-') == std::string::npos) return core;
  const bool alpha_and_hyphens = std::all_of(core.begin(), core.end(), [](char c) { return is_alpha(c) || c == '-'; });
  if (!alpha_and_hyphens || !is_alpha(core.front()) || !is_alpha(core.back())) return core;
  std::erase(core, '-');
  return core;
}

bool has_suffix(std::string_view word, std::string_view suffix, std::size_t min_len) {
  return word.size() >= min_len && word.ends_with(suffix);
}

std::optional<Tag> suffix_tag(std::string_view w) {
  if (has_suffix(w, "ly", 4)) return Tag::RB;
  if (has_suffix(w, "ing", 5)) return Tag::VBG;
  if (has_suffix(w, "ed", 4)) return Tag::VBD;
  if (has_suffix(w, "est", 5)) return Tag::JJS;
  for (std::string_view s : {"ous", "ful", "ive", "able", "ible", "less", "ish", "ic", "al"}) {
    if (has_suffix(w, s, s.size() + 3)) return Tag::JJ;
  }
  for (std::string_view s : {"tion", "sion", "ment", "ness", "ity", "ship", "ism", "ance", "ence"}) {
    if (has_suffix(w, s, s.size() + 2)) return Tag::NN;
  }
  if (has_suffix(w, "s", 3) && !w.ends_with("ss") && !w.ends_with("us") && !w.ends_with("is")) return Tag::NNS;
  return std::nullopt;
}

}  // namespace

std::string_view tag_name(Tag tag) {
  for (const auto& [t, name] : kTagNames) {
    if (t == tag) return name;
  }
  return "OTHER";
}

Tag parse_tag(std::string_view name) {
  for (const auto& [t, n] : kTagNames) {
    if (n == name) return t;
  }
  throw UsageError("unknown POS tag '" + std::string(name) + "'");
}

bool is_noun(Tag tag) { return tag == Tag::NN || tag == Tag::NNS || tag == Tag::NNP; }

bool is_adjective(Tag tag) { return tag == Tag::JJ || tag == Tag::JJR || tag == Tag::JJS; }

bool is_emotional(Tag tag) {
  switch (tag) {
    case Tag::JJ: case Tag::JJR: case Tag::JJS:
    case Tag::RB: case Tag::RBR: case Tag::RBS:
    case Tag::VB: case Tag::VBD: case Tag::VBG: case Tag::VBN: case Tag::VBP: case Tag::VBZ:
      return true;
    default:
      return false;
  }
}

bool is_numeric_token(std::string_view s) {
  std::size_t i = 0;
  const auto digit_run = [&] {
    const std::size_t start = i;
    while (i < s.size() && is_digit(s[i])) ++i;
    return i > start;
  };
  if (!digit_run()) return false;
  if (i == s.size()) return true;
  if (s[i] != '.' && s[i] != ':') return false;
  ++i;
  return digit_run() && i == s.size();
}

bool is_emoticon(std::string_view surface) {
  if (surface.size() < 2) return false;
  return emoticon_set().contains(util::to_lower(surface)) || matches_emoticon_pattern(surface);
}

bool is_punctuation(std::string_view surface) {
  return !surface.empty() &&
         std::all_of(surface.begin(), surface.end(), [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; });
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  const auto emit = [&](std::string surface) {
    const std::size_t position = tokens.size();
    tokens.push_back(Token{std::move(surface), position});
  };

  for (std::string_view chunk : util::split_whitespace(text)) {
    if (is_emoticon(chunk)) {
      emit(std::string(chunk));
      continue;
    }
    std::string_view core = chunk;
    while (!core.empty() && kLeadingPeel.find(core.front()) != std::string_view::npos && !is_emoticon(core)) {
      emit(std::string(1, core.front()));
      core.remove_prefix(1);
    }
    std::vector<char> trailing;
    while (!core.empty() && kTrailingPeel.find(core.back()) != std::string_view::npos && !is_emoticon(core)) {
      trailing.push_back(core.back());
      core.remove_suffix(1);
    }
    if (!core.empty()) {
      emit(is_emoticon(core) ? std::string(core) : strip_inner_hyphens(std::string(core)));
    }
    for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) emit(std::string(1, *it));
  }
  return tokens;
}

Lexicon Lexicon::from_text(std::string_view content) {
  Lexicon lexicon;
  std::size_t line_no = 0;
  for (auto line : util::split_lines(content)) {
    ++line_no;
    line = util::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError("lexicon line " + std::to_string(line_no) + ": expected word<TAB>TAG");
    }
    const auto word = util::to_lower(util::trim(line.substr(0, tab)));
    const auto tag_text = util::trim(line.substr(tab + 1));
    Tag tag{};
    try {
      tag = parse_tag(tag_text);
    } catch (const UsageError& e) {
      throw DataError("lexicon line " + std::to_string(line_no) + ": " + e.what());
    }
    lexicon.entries_.try_emplace(word, tag);
  }
  return lexicon;
}

Lexicon Lexicon::from_file(const std::filesystem::path& path) { return from_text(util::read_file(path)); }

const Lexicon& Lexicon::builtin() {
  static const Lexicon lexicon = from_text(resources::pos_lexicon());
  return lexicon;
}

std::optional<Tag> Lexicon::find(std::string_view word) const {
  const auto it = entries_.find(std::string(word));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

UnitTable UnitTable::from_text(std::string_view content) {
  UnitTable table;
  std::size_t line_no = 0;
  for (auto line : util::split_lines(content)) {
    ++line_no;
    line = util::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError("unit table line " + std::to_string(line_no) + ": expected alias<TAB>canonical");
    }
    auto alias = util::to_lower(util::trim(line.substr(0, tab)));
    auto canonical = util::to_lower(util::trim(line.substr(tab + 1)));
    if (alias.empty() || canonical.empty()) {
      throw DataError("unit table line " + std::to_string(line_no) + ": empty field");
    }
    if (canonical == "-") {
      table.stop_words_.insert(std::move(alias));
    } else {
      table.aliases_.insert_or_assign(std::move(alias), std::move(canonical));
    }
  }
  return table;
}

UnitTable UnitTable::from_file(const std::filesystem::path& path) { return from_text(util::read_file(path)); }

const UnitTable& UnitTable::builtin() {
  static const UnitTable table = from_text(resources::unit_aliases());
  return table;
}

std::optional<std::string> UnitTable::normalize(std::string_view raw_unit) const {
  auto unit = util::to_lower(util::trim(raw_unit));
  if (unit.empty() || stop_words_.contains(unit)) return std::nullopt;
  if (const auto it = aliases_.find(unit); it != aliases_.end()) return it->second;
  return unit;
}

std::vector<TaggedToken> pos_tag(const std::vector<Token>& tokens, const Lexicon& lexicon) {
  std::vector<TaggedToken> tagged;
  tagged.reserve(tokens.size());
  for (const auto& token : tokens) {
    const std::string_view s = token.surface;
    Tag tag = Tag::NN;
    if (is_numeric_token(s)) {
      tag = Tag::CD;
    } else if (is_emoticon(s) || is_punctuation(s)) {
      tag = Tag::SYM;
    } else if (auto found = lexicon.find(util::to_lower(s))) {
      tag = *found;
    } else if (std::any_of(s.begin(), s.end(), is_digit)) {
      tag = Tag::NN;
    } else if (auto by_suffix = suffix_tag(util::to_lower(s))) {
      tag = *by_suffix;
    }
    tagged.push_back(TaggedToken{token, tag});
  }
  return tagged;
}

std::vector<std::string> extract_noun_phrases(const std::vector<TaggedToken>& tagged) {
  std::vector<std::string> words;
  const std::size_t n = tagged.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && is_adjective(tagged[j].tag)) ++j;
    if (j == n || !is_noun(tagged[j].tag)) {
      // adjectives not followed by a noun, or a non-content token
      i = (j > i) ? j : i + 1;
      continue;
    }
    std::size_t k = j;
    while (k < n && is_noun(tagged[k].tag)) ++k;
    while (k < n && is_adjective(tagged[k].tag)) ++k;
    for (std::size_t t = i; t < k; ++t) words.push_back(tagged[t].token.surface);
    i = k;
  }
  return words;
}

std::optional<double> parse_numeric_value(std::string_view s) {
  if (!is_numeric_token(s)) return std::nullopt;
  const auto colon = s.find(':');
  if (colon != std::string_view::npos) {
    const auto hours = s.substr(0, colon);
    const auto minutes = s.substr(colon + 1);
    if (minutes.size() != 2) return std::nullopt;
    int h = 0;
    int m = 0;
    std::from_chars(hours.data(), hours.data() + hours.size(), h);
    std::from_chars(minutes.data(), minutes.data() + minutes.size(), m);
    if (m >= 60) return std::nullopt;
    return static_cast<double>(h) + static_cast<double>(m) / 60.0;
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

MentionExtraction extract_numeric_mentions(const std::vector<TaggedToken>& tagged, const UnitTable& units) {
  MentionExtraction out;
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    if (tagged[i].tag != Tag::CD) continue;
    const auto& surface = tagged[i].token.surface;
    const auto value = parse_numeric_value(surface);
    if (!value) {
      out.diagnostics.push_back(Diagnostic{i, "unparseable number '" + surface + "'"});
      continue;
    }
    NumericMention mention;
    mention.value = *value;
    mention.position = i;
    if (i + 1 < tagged.size() && tagged[i + 1].tag != Tag::CD && tagged[i + 1].tag != Tag::SYM) {
      mention.raw_unit = tagged[i + 1].token.surface;
      mention.unit = units.normalize(*mention.raw_unit);
    }
    out.mentions.push_back(std::move(mention));
  }
  return out;
}

std::optional<std::string> normalize_unit(std::string_view raw_unit, const UnitTable& units) {
  return units.normalize(raw_unit);
}

std::vector<std::string> AnalyzedTweet::words() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

Analyzer::Analyzer() : Analyzer(Lexicon::builtin(), UnitTable::builtin()) {}

Analyzer::Analyzer(Lexicon lexicon, UnitTable units) : lexicon_(std::move(lexicon)), units_(std::move(units)) {}

AnalyzedTweet Analyzer::analyze(std::string id, std::string_view text, std::optional<int> label,
                                std::string_view surface) const {
  AnalyzedTweet out;
  out.id = std::move(id);
  out.text = std::string(text);
  out.surface = surface.empty() ? out.text : std::string(surface);
  out.label = label;
  out.tokens = tokenize(text);
  const auto tagged = pos_tag(out.tokens, lexicon_);
  out.tags.reserve(tagged.size());
  for (const auto& t : tagged) out.tags.push_back(t.tag);
  out.noun_phrase_words = extract_noun_phrases(tagged);
  auto extraction = extract_numeric_mentions(tagged, units_);
  out.mentions = std::move(extraction.mentions);
  out.diagnostics = std::move(extraction.diagnostics);
  return out;
}

}  // namespace numsarc::text
