#include "numsarc/classic_ml.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "numsarc/corpus.hpp"
#include "numsarc/error.hpp"
#include "numsarc/rng.hpp"

namespace numsarc::classic_ml {

namespace {

constexpr int kFormatVersion = 1;

void check_labels01(const std::vector<int>& y, std::size_t n) {
  if (y.size() != n) throw DataError("label count " + std::to_string(y.size()) + " != row count " + std::to_string(n));
  for (int v : y) {
    if (v != 0 && v != 1) throw DataError("labels must be 0 or 1, got " + std::to_string(v));
  }
}

void check_query(std::span<const double> q, std::size_t dim) {
  if (q.size() != dim) {
    throw UsageError("dimension mismatch: query has " + std::to_string(q.size()) + " features, model expects " +
                     std::to_string(dim));
  }
}

double squared_distance(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    s += d * d;
  }
  return s;
}

void check_header(const nlohmann::json& j, const char* kind) {
  if (!j.is_object() || j.value("kind", "") != kind) throw DataError(std::string("expected a ") + kind + " model");
  if (j.value("version", 0) != kFormatVersion) throw DataError(std::string("unsupported ") + kind + " model version");
}

}  // namespace

std::size_t check_matrix(const Matrix& X, const char* what) {
  if (X.empty()) throw DataError(std::string(what) + ": empty training set");
  const std::size_t d = X.front().size();
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].size() != d) throw DataError(std::string(what) + ": ragged feature matrix at row " + std::to_string(i));
    for (double v : X[i]) {
      if (!std::isfinite(v)) throw DataError(std::string(what) + ": non-finite feature at row " + std::to_string(i));
    }
  }
  return d;
}

// ---- Standardizer

Standardizer Standardizer::fit(const Matrix& X) {
  const std::size_t d = check_matrix(X, "standardizer");
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  const double n = static_cast<double>(X.size());
  for (const auto& row : X) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
  }
  for (auto& m : s.mean) m /= n;
  for (const auto& row : X) {
    for (std::size_t j = 0; j < d; ++j) s.scale[j] += (row[j] - s.mean[j]) * (row[j] - s.mean[j]);
  }
  for (auto& v : s.scale) {
    v = std::sqrt(v / n);
    if (v < 1e-12) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::transform(std::span<const double> row) const {
  check_query(row, mean.size());
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean[j]) / scale[j];
  return out;
}

Matrix Standardizer::transform(const Matrix& X) const {
  Matrix out;
  out.reserve(X.size());
  for (const auto& row : X) out.push_back(transform(row));
  return out;
}

nlohmann::json Standardizer::to_json() const { return {{"mean", mean}, {"scale", scale}}; }

Standardizer Standardizer::from_json(const nlohmann::json& j) {
  Standardizer s{j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
  if (s.mean.size() != s.scale.size()) throw DataError("standardizer mean/scale length mismatch");
  return s;
}

// ---- KNN

KnnModel knn_fit(Matrix X, std::vector<int> y, std::size_t k) {
  check_matrix(X, "knn");
  check_labels01(y, X.size());
  if (k == 0 || k > X.size()) {
    throw UsageError("knn k=" + std::to_string(k) + " must be in [1, " + std::to_string(X.size()) + "]");
  }
  return KnnModel{k, std::move(X), std::move(y)};
}

int knn_classify(const KnnModel& model, std::span<const double> query) {
  check_query(query, model.X.front().size());
  std::vector<std::pair<double, std::size_t>> dist(model.X.size());
  for (std::size_t i = 0; i < model.X.size(); ++i) dist[i] = {squared_distance(model.X[i], query), i};
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(model.k), dist.end());
  std::size_t ones = 0;
  for (std::size_t i = 0; i < model.k; ++i) ones += model.y[dist[i].second] == 1;
  return 2 * ones > model.k ? 1 : 0;
}

nlohmann::json KnnModel::to_json() const {
  return {{"kind", "knn"}, {"version", kFormatVersion}, {"k", k}, {"X", X}, {"y", y}};
}

KnnModel KnnModel::from_json(const nlohmann::json& j) {
  check_header(j, "knn");
  return knn_fit(j.at("X").get<Matrix>(), j.at("y").get<std::vector<int>>(), j.at("k").get<std::size_t>());
}

// ---- SVM

double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma) {
  return std::exp(-gamma * squared_distance(u, v));
}

double SvmModel::decision(std::span<const double> query) const {
  if (!support_vectors.empty()) check_query(query, support_vectors.front().size());
  double s = bias;
  for (std::size_t i = 0; i < support_vectors.size(); ++i) s += dual_coef[i] * rbf_kernel(support_vectors[i], query, gamma);
  return s;
}

int svm_predict(const SvmModel& model, std::span<const double> query) { return model.decision(query) > 0.0 ? 1 : 0; }

std::vector<int> svm_predict(const SvmModel& model, const Matrix& X) {
  std::vector<int> out;
  out.reserve(X.size());
  for (const auto& row : X) out.push_back(svm_predict(model, row));
  return out;
}

namespace {

// Kernel rows, fully cached when the matrix fits.
class KernelRows {
 public:
  KernelRows(const Matrix& X, double gamma) : X_(X), gamma_(gamma), cached_(X.size() <= 4000) {
    if (cached_) {
      full_.resize(X.size() * X.size());
      for (std::size_t i = 0; i < X.size(); ++i) {
        full_[i * X.size() + i] = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
          full_[i * X.size() + j] = full_[j * X.size() + i] = rbf_kernel(X[i], X[j], gamma);
        }
      }
    }
  }

  std::span<const double> row(std::size_t i, std::vector<double>& scratch) const {
    const std::size_t n = X_.size();
    if (cached_) return {full_.data() + i * n, n};
    scratch.resize(n);
    for (std::size_t j = 0; j < n; ++j) scratch[j] = rbf_kernel(X_[i], X_[j], gamma_);
    return scratch;
  }

 private:
  const Matrix& X_;
  double gamma_;
  bool cached_;
  std::vector<double> full_;
};

}  // namespace

SvmModel svm_train(const Matrix& X, const std::vector<int>& y, const SvmConfig& config) {
  const std::size_t d = check_matrix(X, "svm");
  const std::size_t n = X.size();
  if (y.size() != n) throw DataError("svm: label count does not match row count");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v != 1 && v != -1) throw DataError("svm labels must be -1 or +1, got " + std::to_string(v));
    (v == 1 ? has_pos : has_neg) = true;
  }
  if (n < 2 || !has_pos || !has_neg) throw DataError("svm needs both classes in the training set");
  if (!(config.C > 0) || !(config.tol > 0)) throw UsageError("svm C and tol must be positive");
  const double C = config.C;
  const double gamma = config.gamma > 0 ? config.gamma : 1.0 / static_cast<double>(d);

  const KernelRows kernel(X, gamma);
  std::vector<double> alpha(n, 0.0), grad(n, -1.0), scratch_i, scratch_j;
  const auto yd = [&](std::size_t t) { return static_cast<double>(y[t]); };
  const auto in_up = [&](std::size_t t) { return (y[t] == 1 && alpha[t] < C) || (y[t] == -1 && alpha[t] > 0); };
  const auto in_low = [&](std::size_t t) { return (y[t] == 1 && alpha[t] > 0) || (y[t] == -1 && alpha[t] < C); };

  SvmModel model;
  model.C = C;
  model.gamma = gamma;
  const std::size_t max_iter = std::max<std::size_t>(1, config.max_iter_factor * n);
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    double m = -std::numeric_limits<double>::infinity(), M = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -yd(t) * grad[t];
      if (in_up(t) && v > m) {
        m = v;
        i = t;
      }
      if (in_low(t) && v < M) {
        M = v;
        j = t;
      }
    }
    if (i == n || j == n || m - M < config.tol) {
      model.converged = true;
      break;
    }
    const auto Ki = kernel.row(i, scratch_i);
    const auto Kj = kernel.row(j, scratch_j);
    const double Qij = yd(i) * yd(j) * Ki[j];
    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = Ki[i] + Kj[j] + 2 * Qij;
      if (quad <= 0) quad = 1e-12;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = Ki[i] + Kj[j] - 2 * Qij;
      if (quad <= 0) quad = 1e-12;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += yd(t) * (yd(i) * Ki[t] * di + yd(j) * Kj[t] * dj);
  }
  model.iterations = iter;

  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = yd(t) * grad[t];
    if (alpha[t] >= C) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2;
  model.bias = -rho;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0) {
      model.support_vectors.push_back(X[t]);
      model.dual_coef.push_back(alpha[t] * yd(t));
      model.support_indices.push_back(t);
    }
  }
  return model;
}

nlohmann::json SvmModel::to_json() const {
  return {{"kind", "svm"},           {"version", kFormatVersion},
          {"C", C},                  {"gamma", gamma},
          {"bias", bias},            {"support_vectors", support_vectors},
          {"dual_coef", dual_coef},  {"support_indices", support_indices},
          {"iterations", iterations}, {"converged", converged}};
}

SvmModel SvmModel::from_json(const nlohmann::json& j) {
  check_header(j, "svm");
  SvmModel m;
  m.C = j.at("C").get<double>();
  m.gamma = j.at("gamma").get<double>();
  m.bias = j.at("bias").get<double>();
  m.support_vectors = j.at("support_vectors").get<Matrix>();
  m.dual_coef = j.at("dual_coef").get<std::vector<double>>();
  m.support_indices = j.value("support_indices", std::vector<std::size_t>{});
  m.iterations = j.value("iterations", std::size_t{0});
  m.converged = j.value("converged", false);
  if (m.dual_coef.size() != m.support_vectors.size()) throw DataError("svm model: coefficient count mismatch");
  return m;
}

std::vector<GridPoint> svm_grid_search(const Matrix& X, const std::vector<int>& y, std::size_t folds,
                                       std::uint64_t seed, SvmConfig base) {
  const std::size_t d = check_matrix(X, "svm grid search");
  check_labels01(y, X.size());
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < X.size(); ++i) ids.push_back(std::to_string(i));
  const auto assignment = corpus::stratified_kfold(ids, y, folds, seed);
  std::vector<GridPoint> out;
  for (double C : {0.1, 1.0, 10.0}) {
    for (double gamma : {0.01, 0.1, 1.0 / static_cast<double>(d), 1.0}) {
      std::size_t correct = 0;
      for (std::size_t f = 0; f < folds; ++f) {
        Matrix train_x, val_x;
        std::vector<int> train_y, val_y;
        for (std::size_t i = 0; i < X.size(); ++i) {
          if (assignment.folds[i] == f) {
            val_x.push_back(X[i]);
            val_y.push_back(y[i]);
          } else {
            train_x.push_back(X[i]);
            train_y.push_back(y[i] == 1 ? 1 : -1);
          }
        }
        const auto scaler = Standardizer::fit(train_x);
        SvmConfig cfg = base;
        cfg.C = C;
        cfg.gamma = gamma;
        const auto model = svm_train(scaler.transform(train_x), train_y, cfg);
        for (std::size_t i = 0; i < val_x.size(); ++i) correct += svm_predict(model, scaler.transform(val_x[i])) == val_y[i];
      }
      out.push_back({C, gamma, static_cast<double>(correct) / static_cast<double>(X.size())});
    }
  }
  return out;
}

// ---- Random forest

int DecisionTree::predict(std::span<const double> query) const {
  std::size_t at = 0;
  while (!nodes[at].is_leaf()) {
    const auto& node = nodes[at];
    at = static_cast<std::size_t>(query[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right);
  }
  return nodes[at].counts[1] > nodes[at].counts[0] ? 1 : 0;
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
};

double gini(double a, double b) {
  const double n = a + b;
  if (n == 0) return 0.0;
  return 1.0 - (a / n) * (a / n) - (b / n) * (b / n);
}

DecisionTree grow_tree(const Matrix& X, const std::vector<int>& y, std::vector<std::size_t> sample,
                       std::size_t max_features, std::size_t min_split, Rng& rng) {
  const std::size_t d = X.front().size();
  DecisionTree tree;
  struct Pending {
    std::size_t node;
    std::vector<std::size_t> sample;
  };
  std::vector<Pending> stack;
  tree.nodes.emplace_back();
  stack.push_back({0, std::move(sample)});
  std::vector<std::size_t> features(d);
  std::vector<std::pair<double, int>> column;
  while (!stack.empty()) {
    auto [node_index, idx] = std::move(stack.back());
    stack.pop_back();
    std::array<std::size_t, 2> counts{};
    for (auto i : idx) counts[static_cast<std::size_t>(y[i])] += 1;
    tree.nodes[node_index].counts = counts;
    if (counts[0] == 0 || counts[1] == 0 || idx.size() < min_split) continue;

    std::iota(features.begin(), features.end(), 0);
    rng.shuffle(std::span<std::size_t>(features));
    Split best;
    std::size_t examined = 0;
    const double total = static_cast<double>(idx.size());
    for (std::size_t f : features) {
      if (examined >= max_features) break;
      column.clear();
      for (auto i : idx) column.emplace_back(X[i][f], y[i]);
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;  // constant here; draw another feature
      ++examined;
      double left[2] = {0, 0};
      for (std::size_t k = 0; k + 1 < column.size(); ++k) {
        left[column[k].second] += 1;
        if (column[k].first == column[k + 1].first) continue;
        const double nl = static_cast<double>(k + 1);
        const double nr = total - nl;
        const double right0 = static_cast<double>(counts[0]) - left[0];
        const double right1 = static_cast<double>(counts[1]) - left[1];
        const double impurity = (nl * gini(left[0], left[1]) + nr * gini(right0, right1)) / total;
        if (impurity < best.impurity) {
          best.impurity = impurity;
          best.feature = static_cast<int>(f);
          best.threshold = column[k].first + (column[k + 1].first - column[k].first) / 2;
        }
      }
    }
    if (best.feature < 0) continue;

    std::vector<std::size_t> left_idx, right_idx;
    for (auto i : idx) (X[i][static_cast<std::size_t>(best.feature)] <= best.threshold ? left_idx : right_idx).push_back(i);
    const auto left = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[node_index];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = static_cast<int>(left);
    node.right = static_cast<int>(left + 1);
    stack.push_back({left + 1, std::move(right_idx)});
    stack.push_back({left, std::move(left_idx)});
  }
  return tree;
}

}  // namespace

ForestModel forest_train(const Matrix& X, const std::vector<int>& y, const ForestConfig& config) {
  const std::size_t d = check_matrix(X, "forest");
  check_labels01(y, X.size());
  if (config.n_estimators == 0) throw UsageError("forest needs at least one tree");
  const std::size_t n = X.size();
  const std::size_t max_features =
      config.max_features > 0 ? std::min(config.max_features, d)
                              : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  ForestModel model;
  model.n_features = d;
  model.seed = config.seed;
  const Rng root(config.seed);
  std::vector<std::array<std::size_t, 2>> oob_votes(n, {0, 0});
  for (std::size_t t = 0; t < config.n_estimators; ++t) {
    Rng rng = root.fork(t);
    std::vector<std::size_t> sample(n);
    std::vector<bool> in_bag(n, false);
    for (auto& s : sample) {
      s = rng.below(n);
      in_bag[s] = true;
    }
    model.trees.push_back(grow_tree(X, y, std::move(sample), max_features, std::max<std::size_t>(2, config.min_samples_split), rng));
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_bag[i]) oob_votes[i][static_cast<std::size_t>(model.trees.back().predict(X[i]))] += 1;
    }
  }
  std::size_t scored = 0, correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (oob_votes[i][0] + oob_votes[i][1] == 0) continue;
    ++scored;
    correct += (oob_votes[i][1] > oob_votes[i][0] ? 1 : 0) == y[i];
  }
  model.oob_accuracy = scored > 0 ? static_cast<double>(correct) / static_cast<double>(scored) : 0.0;
  return model;
}

int forest_predict(const ForestModel& model, std::span<const double> query) {
  check_query(query, model.n_features);
  std::size_t ones = 0;
  for (const auto& tree : model.trees) ones += tree.predict(query) == 1;
  return 2 * ones > model.trees.size() ? 1 : 0;
}

nlohmann::json ForestModel::to_json() const {
  nlohmann::json trees_json = nlohmann::json::array();
  for (const auto& tree : trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : tree.nodes) {
      nodes.push_back({{"feature", node.feature},
                       {"threshold", node.threshold},
                       {"left", node.left},
                       {"right", node.right},
                       {"counts", node.counts}});
    }
    trees_json.push_back(std::move(nodes));
  }
  return {{"kind", "forest"},       {"version", kFormatVersion}, {"n_features", n_features},
          {"seed", seed},           {"oob_accuracy", oob_accuracy}, {"trees", std::move(trees_json)}};
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
  check_header(j, "forest");
  ForestModel m;
  m.n_features = j.at("n_features").get<std::size_t>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.oob_accuracy = j.value("oob_accuracy", 0.0);
  for (const auto& tj : j.at("trees")) {
    DecisionTree tree;
    for (const auto& nj : tj) {
      TreeNode node;
      node.feature = nj.at("feature").get<int>();
      node.threshold = nj.at("threshold").get<double>();
      node.left = nj.at("left").get<int>();
      node.right = nj.at("right").get<int>();
      node.counts = nj.at("counts").get<std::array<std::size_t, 2>>();
      tree.nodes.push_back(node);
    }
    const auto size = static_cast<int>(tree.nodes.size());
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf() && (node.left <= 0 || node.right <= 0 || node.left >= size || node.right >= size ||
                              node.feature >= static_cast<int>(m.n_features))) {
        throw DataError("forest model: malformed tree node");
      }
    }
    if (tree.nodes.empty()) throw DataError("forest model: empty tree");
    m.trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace numsarc::classic_ml
