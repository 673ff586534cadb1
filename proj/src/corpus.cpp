#include "numsarc/corpus.hpp"

#include <algorithm>
#include <numeric>

#include "numsarc/error.hpp"
#include "numsarc/rng.hpp"
#include "numsarc/util.hpp"

namespace numsarc::corpus {

namespace {

bool is_tag_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::string strip_non_ascii(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    // U+2026 HORIZONTAL ELLIPSIS -> "..."
    if (text.compare(i, 3, "\xE2\x80\xA6") == 0) {
      out += "...";
      i += 2;
      continue;
    }
    const auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) out.push_back(static_cast<char>(c));
  }
  return out;
}

bool is_url(std::string_view lower) {
  return lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.") ||
         lower.starts_with("t.co/");
}

std::unordered_set<std::string> canonical_tags(const std::unordered_set<std::string>& tags) {
  std::unordered_set<std::string> out;
  for (const auto& t : tags) {
    std::string_view v = t;
    while (!v.empty() && v.front() == '#') v.remove_prefix(1);
    out.insert(util::to_lower(v));
  }
  return out;
}

// Hashtag names in order of appearance, lowercased, without '#'.
std::vector<std::string> hashtag_names(std::string_view text) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '#') continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_tag_char(text[j])) ++j;
    if (j > i + 1) names.push_back(util::to_lower(text.substr(i + 1, j - i - 1)));
    i = j - 1;
  }
  return names;
}

nlohmann::json parse_line(std::string_view line, std::size_t line_no) {
  try {
    auto j = nlohmann::json::parse(line);
    if (!j.is_object()) throw DataError("line " + std::to_string(line_no) + ": expected a JSON object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

std::optional<int> read_label(const nlohmann::json& j, std::size_t line_no) {
  if (!j.contains("label") || j["label"].is_null()) return std::nullopt;
  const auto& v = j["label"];
  if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
    throw DataError("line " + std::to_string(line_no) + ": label must be 0 or 1");
  }
  return v.get<int>();
}

}  // namespace

const std::unordered_set<std::string>& sarcastic_hashtags() {
  static const std::unordered_set<std::string> tags{"sarcasm", "sarcastic", "beingsarcastic"};
  return tags;
}

const std::unordered_set<std::string>& non_sarcastic_hashtags() {
  static const std::unordered_set<std::string> tags{"nonsarcasm", "notsarcastic"};
  return tags;
}

const std::unordered_set<std::string>& label_hashtags() {
  static const std::unordered_set<std::string> tags = [] {
    auto all = sarcastic_hashtags();
    all.insert(non_sarcastic_hashtags().begin(), non_sarcastic_hashtags().end());
    return all;
  }();
  return tags;
}

std::optional<std::string> normalize_tweet(const RawTweet& raw, const std::unordered_set<std::string>& label_tags,
                                           bool keep_case) {
  const auto labels = canonical_tags(label_tags);
  std::string ascii = strip_non_ascii(raw.text);
  // A '#' always starts a new token so mid-word hashtags are seen.
  std::string spaced;
  spaced.reserve(ascii.size() + 8);
  for (char c : ascii) {
    if (c == '#') spaced.push_back(' ');
    spaced.push_back(c);
  }

  std::vector<std::string> kept;
  for (std::string_view tok : util::split_whitespace(spaced)) {
    std::string_view body = tok;
    if (body.front() == '#') {
      while (!body.empty() && body.front() == '#') body.remove_prefix(1);
      std::size_t name_len = 0;
      while (name_len < body.size() && is_tag_char(body[name_len])) ++name_len;
      if (labels.contains(util::to_lower(body.substr(0, name_len)))) body.remove_prefix(name_len);
    }
    if (body.empty()) continue;
    const std::string lower = util::to_lower(body);
    if (is_url(lower) || body.front() == '@') continue;
    kept.emplace_back(keep_case ? std::string(body) : lower);
  }
  std::size_t start = 0;
  while (kept.size() - start > 1 && util::to_lower(kept[start]) == "rt") ++start;
  if (start == kept.size()) return std::nullopt;

  std::string out;
  for (std::size_t i = start; i < kept.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += kept[i];
  }
  return out;
}

std::optional<int> label_by_hashtag(std::string_view text) {
  bool sarcastic = false;
  bool non_sarcastic = false;
  for (const auto& name : hashtag_names(text)) {
    sarcastic |= sarcastic_hashtags().contains(name);
    non_sarcastic |= non_sarcastic_hashtags().contains(name);
  }
  if (sarcastic == non_sarcastic) return std::nullopt;
  return sarcastic ? 1 : 0;
}

bool is_numeric_tweet(const std::vector<text::Token>& tokens) {
  return std::any_of(tokens.begin(), tokens.end(), [](const text::Token& t) { return text::is_numeric_token(t.surface); });
}

double numeric_fraction(const std::vector<LabeledTweet>& corpus) {
  if (corpus.empty()) throw DataError("numeric_fraction: empty corpus");
  std::size_t numeric = 0;
  for (const auto& t : corpus) {
    if (is_numeric_tweet(text::tokenize(t.text))) ++numeric;
  }
  return static_cast<double>(numeric) / static_cast<double>(corpus.size());
}

IngestReport ingest(const std::vector<RawTweet>& raw) {
  IngestReport report;
  std::unordered_set<std::string> seen_ids;
  std::unordered_set<std::string> seen_texts;
  for (const auto& tweet : raw) {
    if (tweet.id.empty()) throw DataError("tweet with empty id");
    if (!seen_ids.insert(tweet.id).second) throw DataError("duplicate tweet id '" + tweet.id + "'");
    const auto label = tweet.label ? tweet.label : label_by_hashtag(tweet.text);
    if (!label) {
      ++report.unlabeled;
      continue;
    }
    auto normalized = normalize_tweet(tweet);
    if (!normalized) {
      ++report.empty;
      continue;
    }
    if (!seen_texts.insert(*normalized).second) {
      ++report.duplicates;
      continue;
    }
    auto surface = normalize_tweet(tweet, label_hashtags(), /*keep_case=*/true);
    report.tweets.push_back(LabeledTweet{tweet.id, std::move(*normalized), std::move(*surface), *label});
  }
  return report;
}

DatasetPreset DatasetPreset::preset(std::string_view name) {
  const auto lower = util::to_lower(name);
  if (lower == "d1") return {DatasetName::D1, 100000, 250000, false};
  if (lower == "d2") return {DatasetName::D2, 8681, 8681, true};
  if (lower == "d3") return {DatasetName::D3, 8681, 42107, true};
  if (lower == "test") return {DatasetName::Test, 1843, 8317, true};
  throw UsageError("unknown dataset preset '" + std::string(name) + "' (expected d1, d2, d3 or test)");
}

std::string_view dataset_name(DatasetName name) {
  switch (name) {
    case DatasetName::D1: return "d1";
    case DatasetName::D2: return "d2";
    case DatasetName::D3: return "d3";
    case DatasetName::Test: return "test";
    case DatasetName::Custom: return "custom";
  }
  return "custom";
}

std::vector<LabeledTweet> build_dataset(const std::vector<LabeledTweet>& corpus, const DatasetPreset& preset,
                                        std::uint64_t seed) {
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].label == 1) {
      if (!preset.numeric_only_positive || is_numeric_tweet(text::tokenize(corpus[i].text))) positives.push_back(i);
    } else {
      negatives.push_back(i);
    }
  }
  if (positives.size() < preset.pos_count) {
    throw DataError("not enough " + std::string(preset.numeric_only_positive ? "numeric " : "") +
                    "sarcastic tweets: need " + std::to_string(preset.pos_count) + ", have " +
                    std::to_string(positives.size()));
  }
  if (negatives.size() < preset.neg_count) {
    throw DataError("not enough non-sarcastic tweets: need " + std::to_string(preset.neg_count) + ", have " +
                    std::to_string(negatives.size()));
  }
  Rng rng(seed);
  rng.shuffle(std::span(positives));
  rng.shuffle(std::span(negatives));
  std::vector<std::size_t> chosen(positives.begin(), positives.begin() + static_cast<std::ptrdiff_t>(preset.pos_count));
  chosen.insert(chosen.end(), negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(preset.neg_count));
  std::sort(chosen.begin(), chosen.end());

  std::vector<LabeledTweet> out;
  out.reserve(chosen.size());
  for (auto i : chosen) out.push_back(corpus[i]);
  return out;
}

std::size_t FoldAssignment::fold_of(const std::string& id) const {
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw DataError("fold assignment has no entry for id '" + id + "'");
  return folds[static_cast<std::size_t>(it - ids.begin())];
}

nlohmann::json FoldAssignment::to_json() const {
  nlohmann::json assignments = nlohmann::json::object();
  for (std::size_t i = 0; i < ids.size(); ++i) assignments[ids[i]] = folds[i];
  nlohmann::json j;
  j["k"] = k;
  j["seed"] = seed;
  j["assignments"] = std::move(assignments);
  return j;
}

FoldAssignment FoldAssignment::from_json(const nlohmann::json& j) {
  FoldAssignment f;
  try {
    f.k = j.at("k").get<std::size_t>();
    f.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [id, fold] : j.at("assignments").items()) {
      f.ids.push_back(id);
      f.folds.push_back(fold.get<std::size_t>());
      if (f.folds.back() >= f.k) throw DataError("fold index out of range for id '" + id + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed fold assignment: ") + e.what());
  }
  return f;
}

FoldAssignment stratified_kfold(const std::vector<std::string>& ids, const std::vector<int>& labels, std::size_t k,
                                std::uint64_t seed) {
  if (k < 2) throw UsageError("k-fold needs k >= 2");
  if (ids.size() != labels.size()) throw UsageError("ids and labels differ in length");
  std::unordered_set<std::string> unique(ids.begin(), ids.end());
  if (unique.size() != ids.size()) throw DataError("duplicate ids in dataset");

  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] == 1 ? 1 : 0].push_back(i);
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < k) {
      throw DataError("class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                      " members, fewer than k=" + std::to_string(k));
    }
  }

  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.ids = ids;
  out.folds.assign(ids.size(), 0);
  Rng rng(seed);
  std::size_t next_fold = 0;
  for (int c = 0; c < 2; ++c) {
    rng.shuffle(std::span(by_class[c]));
    for (auto index : by_class[c]) {
      out.folds[index] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  }
  return out;
}

FoldAssignment stratified_kfold(const std::vector<LabeledTweet>& dataset, std::size_t k, std::uint64_t seed) {
  std::vector<std::string> ids;
  std::vector<int> labels;
  for (const auto& t : dataset) {
    ids.push_back(t.id);
    labels.push_back(t.label);
  }
  return stratified_kfold(ids, labels, k, seed);
}

std::vector<RawTweet> parse_raw_jsonl(std::string_view content) {
  std::vector<RawTweet> out;
  std::size_t line_no = 0;
  for (auto line : util::split_lines(content)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    const auto j = parse_line(line, line_no);
    if (!j.contains("id") || !j["id"].is_string() || !j.contains("text") || !j["text"].is_string()) {
      throw DataError("line " + std::to_string(line_no) + ": \"id\" and \"text\" must be strings");
    }
    out.push_back(RawTweet{j["id"].get<std::string>(), j["text"].get<std::string>(), read_label(j, line_no)});
  }
  return out;
}

std::vector<RawTweet> read_raw_jsonl(const std::filesystem::path& path) {
  try {
    return parse_raw_jsonl(util::read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<LabeledTweet> read_labeled_jsonl(const std::filesystem::path& path) {
  const auto content = util::read_file(path);
  std::vector<LabeledTweet> out;
  std::size_t line_no = 0;
  for (auto line : util::split_lines(content)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    const auto j = parse_line(line, line_no);
    const auto where = path.string() + ":" + std::to_string(line_no);
    if (!j.contains("id") || !j["id"].is_string() || !j.contains("text") || !j["text"].is_string()) {
      throw DataError(where + ": \"id\" and \"text\" must be strings");
    }
    const auto label = read_label(j, line_no);
    if (!label) throw DataError(where + ": missing label");
    LabeledTweet t;
    t.id = j["id"].get<std::string>();
    t.text = j["text"].get<std::string>();
    t.surface = j.contains("surface") && j["surface"].is_string() ? j["surface"].get<std::string>() : t.text;
    t.label = *label;
    out.push_back(std::move(t));
  }
  return out;
}

std::string to_jsonl(const std::vector<LabeledTweet>& tweets) {
  std::string out;
  for (const auto& t : tweets) {
    nlohmann::ordered_json j;
    j["id"] = t.id;
    j["text"] = t.text;
    j["label"] = t.label;
    if (t.surface != t.text) j["surface"] = t.surface;
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace numsarc::corpus
