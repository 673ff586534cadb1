#include "numsarc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "numsarc/error.hpp"
#include "numsarc/rng.hpp"

namespace numsarc::synth {

namespace {

struct TopicSeed {
  const char* anchor;
  const char* variants[2];
  const char* unit;
  bool sarcastic_low;
};

// Topic i owns the value block [i, i+1) * (separation + 8) sigma.
constexpr TopicSeed kTopics[] = {
    {"battery", {"phone", "backup"}, "hours", true},
    {"homework", {"essay", "assignment"}, "pages", false},
    {"marathon", {"run", "race"}, "miles", false},
    {"commute", {"train", "bus"}, "minutes", false},
    {"room", {"office", "thermostat"}, "degrees", false},
    {"presentation", {"meeting", "deck"}, "slides", false},
    {"paycheck", {"salary", "bonus"}, "dollars", true},
    {"vacation", {"trip", "holiday"}, "days", true},
};

constexpr const char* kAdjectives[] = {"great", "awesome", "perfect", "amazing", "lovely", "nice"};
constexpr const char* kTails[] = {"", " !", " !!", " .", " :)", " :("};

std::string render(std::size_t form, const std::string& adj, const std::string& anchor, const std::string& variant,
                   const std::string& value, const std::string& unit) {
  switch (form) {
    case 0: return adj + " , my " + anchor + " " + variant + " gave me " + value + " " + unit;
    case 1: return "so the " + anchor + " " + variant + " took " + value + " " + unit;
    case 2: return "just " + value + " " + unit + " for the " + anchor + " " + variant;
    case 3: return adj + " " + anchor + " " + variant + " with " + value + " " + unit;
    default: return "the " + anchor + " " + variant + " was only " + value + " " + unit;
  }
}

}  // namespace

void SynthConfig::validate() const {
  if (count < 2) throw UsageError("synth count must be at least 2");
  if (!(sarcastic_fraction > 0 && sarcastic_fraction < 1)) throw UsageError("sarcastic fraction must be in (0, 1)");
  if (!(sigma > 0)) throw UsageError("sigma must be positive");
  if (!(separation >= 6.0)) throw UsageError("class means must be at least 6 sigmas apart");
}

std::vector<Topic> topics(const SynthConfig& config) {
  std::vector<Topic> out;
  const double block = (config.separation + 8.0) * config.sigma;
  for (std::size_t i = 0; i < std::size(kTopics); ++i) {
    const auto& s = kTopics[i];
    const double low = static_cast<double>(i) * block + 4.0 * config.sigma;
    const double high = low + config.separation * config.sigma;
    Topic t{s.anchor, {s.variants[0], s.variants[1]}, s.unit, s.sarcastic_low ? low : high,
            s.sarcastic_low ? high : low};
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<corpus::LabeledTweet> generate(const SynthConfig& config) {
  config.validate();
  const auto table = topics(config);
  Rng rng(config.seed);
  const auto positives = static_cast<std::size_t>(std::llround(config.sarcastic_fraction * config.count));
  std::vector<int> labels(config.count, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(positives), 1);
  rng.shuffle(std::span<int>(labels));

  std::vector<corpus::LabeledTweet> out;
  out.reserve(config.count);
  for (std::size_t i = 0; i < config.count; ++i) {
    const auto& topic = table[rng.below(table.size())];
    const int label = labels[i];
    const double mean = label == 1 ? topic.sarcastic_mean : topic.non_sarcastic_mean;
    const double value = std::max(1.0, std::round(rng.normal(mean, config.sigma)));
    const std::string variant = topic.variants[rng.below(topic.variants.size())];
    const std::string adj = kAdjectives[rng.below(std::size(kAdjectives))];
    const std::size_t form = rng.below(5);
    const std::string tail = kTails[rng.below(std::size(kTails))];
    char value_text[32];
    std::snprintf(value_text, sizeof value_text, "%.0f", value);
    char id[32];
    std::snprintf(id, sizeof id, "synth-%05zu", i + 1);
    const std::string body = render(form, adj, topic.anchor, variant, value_text, topic.unit) + tail;
    out.push_back({id, body, body, label});
  }
  return out;
}

Split holdout_split(const std::vector<corpus::LabeledTweet>& tweets, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0 && test_fraction < 1)) throw UsageError("test fraction must be in (0, 1)");
  Rng rng(seed);
  std::vector<bool> in_test(tweets.size(), false);
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < tweets.size(); ++i) {
      if (tweets[i].label == cls) members.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members));
    const auto take = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
    for (std::size_t j = 0; j < take; ++j) in_test[members[j]] = true;
  }
  Split split;
  for (std::size_t i = 0; i < tweets.size(); ++i) (in_test[i] ? split.test : split.train).push_back(tweets[i]);
  if (split.train.empty() || split.test.empty()) throw DataError("hold-out split left an empty side");
  return split;
}

}  // namespace numsarc::synth
