#include "numsarc/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "numsarc/error.hpp"
#include "numsarc/fingerprint.hpp"
#include "numsarc/rng.hpp"
#include "numsarc/util.hpp"

namespace numsarc::embeddings {

namespace {

bool parse_double(std::string_view s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_size(std::string_view s, std::size_t& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// -log(sigmoid(x)), stable for large |x|
double neg_log_sigmoid(double x) { return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {}

void EmbeddingTable::add(std::string word, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw DataError("vector for '" + word + "' has " + std::to_string(vector.size()) + " components, expected " +
                    std::to_string(dim_));
  }
  if (!std::all_of(vector.begin(), vector.end(), [](double v) { return std::isfinite(v); })) {
    throw DataError("vector for '" + word + "' has non-finite components");
  }
  if (index_.contains(word)) throw DataError("duplicate word '" + word + "'");
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  values_.insert(values_.end(), vector.begin(), vector.end());
}

std::optional<std::size_t> EmbeddingTable::index_of(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingTable::row(std::size_t index) const {
  return std::span<const double>(values_).subspan(index * dim_, dim_);
}

std::span<const double> EmbeddingTable::find(std::string_view word) const {
  const auto index = index_of(word);
  return index ? row(*index) : std::span<const double>{};
}

std::string EmbeddingTable::fingerprint() const {
  Fingerprint fp;
  fp.add(static_cast<std::uint64_t>(dim_));
  for (const auto& w : words_) fp.add(std::string_view(w));
  fp.add(std::span<const double>(values_));
  return fp.hex();
}

std::string EmbeddingTable::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << words_.size() << ' ' << dim_ << '\n';
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out << words_[i];
    for (double v : row(i)) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

EmbeddingTable parse_embeddings(std::string_view content, std::optional<std::size_t> expected_dim) {
  std::optional<EmbeddingTable> table;
  std::optional<std::size_t> header_dim;
  std::size_t line_no = 0;
  std::vector<double> values;
  for (auto line : util::split_lines(content)) {
    ++line_no;
    const auto fields = util::split_whitespace(line);
    if (fields.empty()) continue;
    std::size_t count = 0;
    std::size_t dim = 0;
    if (line_no == 1 && fields.size() == 2 && parse_size(fields[0], count) && parse_size(fields[1], dim)) {
      header_dim = dim;
      continue;
    }
    if (fields.size() < 2) throw DataError("line " + std::to_string(line_no) + ": row has no vector components");
    values.clear();
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0.0;
      if (!parse_double(fields[i], v)) {
        throw DataError("line " + std::to_string(line_no) + ": non-numeric field '" + std::string(fields[i]) + "'");
      }
      values.push_back(v);
    }
    if (!table) {
      const std::size_t dim_here = values.size();
      if (header_dim && *header_dim != dim_here) {
        throw DataError("line " + std::to_string(line_no) + ": header declares d=" + std::to_string(*header_dim) +
                        " but row has " + std::to_string(dim_here));
      }
      table.emplace(dim_here);
    }
    if (values.size() != table->dim()) {
      throw DataError("line " + std::to_string(line_no) + ": ragged row with " + std::to_string(values.size()) +
                      " components, expected " + std::to_string(table->dim()));
    }
    try {
      table->add(std::string(fields[0]), values);
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!table) throw DataError("embedding file has no vectors");
  if (expected_dim && *expected_dim != table->dim()) {
    throw DataError("dimension mismatch: expected d=" + std::to_string(*expected_dim) + ", file has d=" +
                    std::to_string(table->dim()));
  }
  return std::move(*table);
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::optional<std::size_t> expected_dim) {
  try {
    return parse_embeddings(util::read_file(path), expected_dim);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

ComposedVector compose_vector(const std::vector<std::string>& words, const EmbeddingTable& table) {
  ComposedVector out;
  out.values.assign(table.dim(), 0.0);
  for (const auto& w : words) {
    const auto v = table.find(w);
    if (v.empty()) continue;
    for (std::size_t i = 0; i < v.size(); ++i) out.values[i] += v[i];
    ++out.used;
  }
  if (out.used > 0) {
    for (double& x : out.values) x /= static_cast<double>(out.used);
  }
  return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw UsageError("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " + std::to_string(v.size()) + ")");
  }
  const double nu = std::sqrt(dot(u, u));
  const double nv = std::sqrt(dot(v, v));
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

void SgnsConfig::validate() const {
  if (dim == 0 || window == 0 || negatives == 0 || epochs == 0 || min_count == 0 || !(learning_rate > 0.0)) {
    throw UsageError("SGNS config: dim, window, negatives, epochs, min_count and learning_rate must be positive");
  }
}

double sgns_loss_and_gradient(std::span<const double> center, std::span<const double> context,
                              std::span<const double> negatives, std::span<double> grad_center,
                              std::span<double> grad_context, std::span<double> grad_negatives) {
  const std::size_t d = center.size();
  std::fill(grad_center.begin(), grad_center.end(), 0.0);

  const double pos_score = dot(center, context);
  double loss = neg_log_sigmoid(pos_score);
  const double pos_coeff = sigmoid(pos_score) - 1.0;  // d/ds of -log s(s)
  for (std::size_t i = 0; i < d; ++i) {
    grad_center[i] += pos_coeff * context[i];
    grad_context[i] = pos_coeff * center[i];
  }
  const std::size_t n_neg = negatives.size() / d;
  for (std::size_t n = 0; n < n_neg; ++n) {
    const auto neg = negatives.subspan(n * d, d);
    const double score = dot(center, neg);
    loss += neg_log_sigmoid(-score);
    const double coeff = sigmoid(score);  // d/ds of -log s(-s)
    for (std::size_t i = 0; i < d; ++i) {
      grad_center[i] += coeff * neg[i];
      grad_negatives[n * d + i] = coeff * center[i];
    }
  }
  return loss;
}

SgnsResult train_sgns(const std::vector<std::vector<std::string>>& sentences, const SgnsConfig& config) {
  config.validate();
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences) {
    for (const auto& w : s) ++counts[w];
  }
  std::vector<std::pair<std::string, std::size_t>> vocab;
  for (const auto& [w, c] : counts) {
    if (c >= config.min_count) vocab.emplace_back(w, c);
  }
  if (vocab.empty()) throw DataError("SGNS: vocabulary is empty after min-count filtering");
  std::stable_sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vocab.size(); ++i) index.emplace(vocab[i].first, i);

  // cumulative unigram^(3/4) distribution for negative draws
  std::vector<double> cumulative(vocab.size());
  double total = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    total += std::pow(static_cast<double>(vocab[i].second), 0.75);
    cumulative[i] = total;
  }

  const std::size_t d = config.dim;
  Rng rng(config.seed);
  std::vector<double> input(vocab.size() * d);
  std::vector<double> output(vocab.size() * d, 0.0);
  for (double& x : input) x = rng.uniform(-0.5, 0.5) / static_cast<double>(d);

  std::vector<std::vector<std::size_t>> encoded;
  encoded.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<std::size_t> ids;
    for (const auto& w : s) {
      if (auto it = index.find(w); it != index.end()) ids.push_back(it->second);
    }
    encoded.push_back(std::move(ids));
  }

  SgnsResult result{EmbeddingTable(d), {}};
  std::vector<double> grad_center(d), grad_context(d), grad_neg(config.negatives * d), neg_buffer(config.negatives * d);
  std::vector<std::size_t> neg_ids(config.negatives);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& ids : encoded) {
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const std::size_t lo = i >= config.window ? i - config.window : 0;
        const std::size_t hi = std::min(ids.size() - 1, i + config.window);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const std::size_t c = ids[i];
          const std::size_t o = ids[j];
          for (std::size_t n = 0; n < config.negatives; ++n) {
            const double draw = rng.uniform() * total;
            const auto pos = std::upper_bound(cumulative.begin(), cumulative.end(), draw) - cumulative.begin();
            neg_ids[n] = std::min(static_cast<std::size_t>(pos), vocab.size() - 1);
            std::copy_n(output.begin() + static_cast<std::ptrdiff_t>(neg_ids[n] * d), d,
                        neg_buffer.begin() + static_cast<std::ptrdiff_t>(n * d));
          }
          std::span<double> center(input.data() + c * d, d);
          std::span<double> context(output.data() + o * d, d);
          loss_sum += sgns_loss_and_gradient(center, context, neg_buffer, grad_center, grad_context, grad_neg);
          ++pairs;
          const double lr = config.learning_rate;
          for (std::size_t k = 0; k < d; ++k) {
            center[k] -= lr * grad_center[k];
            context[k] -= lr * grad_context[k];
          }
          for (std::size_t n = 0; n < config.negatives; ++n) {
            double* target = output.data() + neg_ids[n] * d;
            for (std::size_t k = 0; k < d; ++k) target[k] -= lr * grad_neg[n * d + k];
          }
        }
      }
    }
    result.epoch_loss.push_back(pairs > 0 ? loss_sum / static_cast<double>(pairs) : 0.0);
  }
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    result.table.add(vocab[i].first, std::span<const double>(input).subspan(i * d, d));
  }
  return result;
}

}  // namespace numsarc::embeddings
