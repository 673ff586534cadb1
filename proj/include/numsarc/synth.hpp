#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "numsarc/corpus.hpp"

namespace numsarc::synth {

struct SynthConfig {
  std::size_t count = 2000;
  double sarcastic_fraction = 0.5;
  double sigma = 1.0;       // per-unit standard deviation
  double separation = 8.0;  // distance between class means in sigmas, at least 6
  std::uint64_t seed = 1;

  void validate() const;
};

struct Topic {
  std::string anchor;
  std::vector<std::string> variants;
  std::string unit;
  double sarcastic_mean = 0.0;
  double non_sarcastic_mean = 0.0;
};

/// Topic table with the class means implied by `config`.
std::vector<Topic> topics(const SynthConfig& config);

/// Templated tweets whose only class signal is the value attached to each topic's unit.
std::vector<corpus::LabeledTweet> generate(const SynthConfig& config);

struct Split {
  std::vector<corpus::LabeledTweet> train;
  std::vector<corpus::LabeledTweet> test;
};

/// Stratified hold-out of `test_fraction` (rounded per class), order preserved.
Split holdout_split(const std::vector<corpus::LabeledTweet>& tweets, double test_fraction, std::uint64_t seed);

}  // namespace numsarc::synth
