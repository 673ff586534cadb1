#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "numsarc/classic_ml.hpp"
#include "numsarc/embeddings.hpp"
#include "numsarc/features.hpp"
#include "numsarc/neural.hpp"
#include "numsarc/rulebase.hpp"

namespace numsarc {

inline constexpr std::string_view kPipelines[] = {"rule-exact", "rule-cosine", "knn",     "svm",
                                                  "forest",     "cnn-ff",      "lstm-ff", "cnn-lstm-ff"};

bool is_pipeline_name(std::string_view name);
bool is_neural_pipeline(std::string_view name);

struct RunConfig {
  std::string pipeline = "rule-exact";
  std::uint64_t seed = 1;
  std::size_t folds = 5;
  std::string train_path;
  std::string test_path;
  std::string embeddings_path;

  rulebase::RuleConfig rule;
  embeddings::SgnsConfig sgns;
  features::FeatureConfig features;
  std::size_t knn_k = 3;
  classic_ml::SvmConfig svm;
  bool svm_grid_search = false;
  classic_ml::ForestConfig forest;
  neural::ModelConfig model;
  neural::TrainingConfig training;

  /// Picks the neural presets that match the pipeline name.
  void set_pipeline(const std::string& name);
  /// Sets the run seed and every per-module seed derived from it.
  void set_seed(std::uint64_t value);
  void validate() const;
  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown pipeline names raise UsageError.
  static RunConfig from_json(const nlohmann::json& j);
  std::string fingerprint() const;
};

/// Parses the TOML subset used for config files: [tables], dotted table names, key = string | number | bool | array.
nlohmann::json parse_toml(std::string_view content);

/// Raw contents of a .json or .toml config file.
nlohmann::json read_config_json(const std::filesystem::path& path);

/// Reads a .json or .toml config file.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace numsarc
