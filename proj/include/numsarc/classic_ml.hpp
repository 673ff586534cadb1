#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace numsarc::classic_ml {

using Matrix = std::vector<std::vector<double>>;

/// Zero mean, unit variance per column. Constant columns get scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& X);
  std::vector<double> transform(std::span<const double> row) const;
  Matrix transform(const Matrix& X) const;
  nlohmann::json to_json() const;
  static Standardizer from_json(const nlohmann::json& j);
};

/// Throws DataError for an empty or ragged matrix; returns the column count.
std::size_t check_matrix(const Matrix& X, const char* what);

// ---- KNN

struct KnnModel {
  std::size_t k = 3;
  Matrix X;
  std::vector<int> y;  // 0/1

  nlohmann::json to_json() const;
  static KnnModel from_json(const nlohmann::json& j);
};

KnnModel knn_fit(Matrix X, std::vector<int> y, std::size_t k = 3);
int knn_classify(const KnnModel& model, std::span<const double> query);

// ---- SVM

struct SvmConfig {
  double C = 1.0;
  double gamma = 0.0;  // <= 0 means 1 / n_features
  double tol = 1e-3;
  std::size_t max_iter_factor = 10;  // iteration cap = factor * n
};

struct SvmModel {
  Matrix support_vectors;
  std::vector<double> dual_coef;  // alpha_i * y_i
  std::vector<std::size_t> support_indices;
  double bias = 0.0;
  double C = 1.0;
  double gamma = 1.0;
  std::size_t iterations = 0;
  bool converged = false;

  double decision(std::span<const double> query) const;
  nlohmann::json to_json() const;
  static SvmModel from_json(const nlohmann::json& j);
};

double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma);

/// Labels must be -1 or +1.
SvmModel svm_train(const Matrix& X, const std::vector<int>& y, const SvmConfig& config = {});
/// 1 if the decision value is positive, else 0.
int svm_predict(const SvmModel& model, std::span<const double> query);
std::vector<int> svm_predict(const SvmModel& model, const Matrix& X);

struct GridPoint {
  double C = 0.0;
  double gamma = 0.0;
  double accuracy = 0.0;
};

/// Sweep C in {0.1, 1, 10} and gamma in {0.01, 0.1, 1/d, 1} with inner stratified folds. Labels 0/1.
std::vector<GridPoint> svm_grid_search(const Matrix& X, const std::vector<int>& y, std::size_t folds,
                                       std::uint64_t seed, SvmConfig base = {});

// ---- Random forest

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::array<std::size_t, 2> counts{};  // class counts of training samples reaching the node

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int predict(std::span<const double> query) const;
};

struct ForestConfig {
  std::size_t n_estimators = 10;
  std::size_t max_features = 0;  // 0 means ceil(sqrt(d))
  std::size_t min_samples_split = 2;
  std::uint64_t seed = 1;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  std::size_t n_features = 0;
  std::uint64_t seed = 0;
  double oob_accuracy = 0.0;  // over samples left out by at least one tree

  nlohmann::json to_json() const;
  static ForestModel from_json(const nlohmann::json& j);
};

ForestModel forest_train(const Matrix& X, const std::vector<int>& y, const ForestConfig& config = {});
/// Majority vote; ties go to 0.
int forest_predict(const ForestModel& model, std::span<const double> query);

}  // namespace numsarc::classic_ml
