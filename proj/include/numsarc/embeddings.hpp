#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace numsarc::embeddings {

/// Vocabulary -> d-dimensional vectors, row-major storage. Immutable once shared.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim = 0);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  /// Throws DataError on duplicate words, dimension mismatch or non-finite values.
  void add(std::string word, std::span<const double> vector);

  std::optional<std::size_t> index_of(std::string_view word) const;
  std::span<const double> row(std::size_t index) const;
  /// nullptr-free lookup; empty span when out of vocabulary.
  std::span<const double> find(std::string_view word) const;
  const std::vector<std::string>& words() const { return words_; }

  /// Hex digest of words and values.
  std::string fingerprint() const;
  /// Text vector format with a "|V| d" header line.
  std::string to_text() const;

 private:
  std::size_t dim_;
  std::vector<std::string> words_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Rows of "word v1 ... vd"; an optional leading "|V| d" header is skipped.
EmbeddingTable parse_embeddings(std::string_view content, std::optional<std::size_t> expected_dim = std::nullopt);
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               std::optional<std::size_t> expected_dim = std::nullopt);

struct ComposedVector {
  std::vector<double> values;
  std::size_t used = 0;  // in-vocabulary words that contributed
  bool empty() const { return used == 0; }
};

/// Mean of the in-vocabulary word vectors; OOV words are skipped and do not
/// count in the divisor. All-OOV gives a zero vector with used == 0.
ComposedVector compose_vector(const std::vector<std::string>& words, const EmbeddingTable& table);

/// dot(u,v)/(|u||v|), 0 when either norm is zero. Throws UsageError on mismatched dimensions.
double cosine(std::span<const double> u, std::span<const double> v);

struct SgnsConfig {
  std::size_t dim = 200;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::size_t min_count = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SgnsResult {
  EmbeddingTable table;
  std::vector<double> epoch_loss;  // mean loss per (center, context) pair
};

/// Skip-gram with negative sampling; negatives drawn from unigram^(3/4).
/// Single-threaded and bitwise reproducible for a given seed.
SgnsResult train_sgns(const std::vector<std::vector<std::string>>& sentences, const SgnsConfig& config);

/// Loss -log s(c.o) - sum_n log s(-c.n) for one center c, context o and
/// negatives n (rows of `negatives`, each of length c.size()). Gradients are
/// written to the output spans, which must match the inputs in size.
double sgns_loss_and_gradient(std::span<const double> center, std::span<const double> context,
                              std::span<const double> negatives, std::span<double> grad_center,
                              std::span<double> grad_context, std::span<double> grad_negatives);

}  // namespace numsarc::embeddings
