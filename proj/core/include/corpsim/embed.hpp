#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpsim/corpus_io.hpp"

namespace corpsim {

/// Token -> dense vector table with a fixed dimension. Tokens keep their
/// insertion (file) order.
class EmbeddingSet {
 public:
  explicit EmbeddingSet(std::size_t dim, std::string source_label = {});

  /// Throws FormatError on a dimension mismatch, a non-finite entry or a
  /// duplicate token.
  void add(std::string token, std::span<const double> vector);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::string& source_label() const noexcept { return source_label_; }
  void set_source_label(std::string label) { source_label_ = std::move(label); }

  bool contains(std::string_view token) const;
  /// Row index of `token`, or -1.
  std::ptrdiff_t index_of(std::string_view token) const;
  std::span<const double> vector(std::size_t row) const;
  /// Throws OovError.
  std::span<const double> vector(std::string_view token) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept;
  };

  std::size_t dim_;
  std::string source_label_;
  std::vector<std::string> tokens_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
};

/// Word-vector text format: "N D\n" then N lines of "token v1 ... vD\n".
/// Throws FormatError carrying the 1-based line number.
EmbeddingSet parse_embeddings(std::string_view text, std::string source_label = {});
EmbeddingSet load_embeddings(const std::filesystem::path& path);

/// Inverse of parse_embeddings; values printed with 9 significant digits.
/// Throws FormatError for an empty set or a token that contains whitespace.
std::string format_embeddings(const EmbeddingSet& embs);
void save_embeddings(const EmbeddingSet& embs, const std::filesystem::path& path);

inline constexpr std::size_t kDefaultTargetCount = 1000;
inline constexpr std::size_t kDefaultNeighborCount = 10;

struct TargetWords {
  std::vector<std::string> words;
  std::vector<std::string> warnings;
};

/// The k most frequent background tokens that are not purely digits, ties in
/// ascending byte order. Throws FeatureError on an empty background.
TargetWords select_target_words(const TokenStream& background, std::size_t k = kDefaultTargetCount);

/// Unit-normalised copy of an embedding set for repeated cosine queries.
/// Zero-norm rows are never returned as neighbours.
class NeighborIndex {
 public:
  explicit NeighborIndex(const EmbeddingSet& embs);

  /// Top-n tokens by cosine similarity to `word` (excluded), ties broken by
  /// ascending token. Throws OovError or InsufficientDataError (size <= n).
  std::vector<std::string> query(std::string_view word, std::size_t n = kDefaultNeighborCount) const;

  const EmbeddingSet& embeddings() const noexcept { return *embs_; }

 private:
  const EmbeddingSet* embs_;
  std::vector<double> unit_;
  std::vector<char> nonzero_;
};

std::vector<std::string> nearest_neighbors(const EmbeddingSet& embs, std::string_view word,
                                           std::size_t n = kDefaultNeighborCount);

struct OverlapScore {
  double mean_percent = 0.0;
  std::vector<std::pair<std::string, double>> per_word;  ///< in target order, covered targets only
  std::size_t covered = 0;
  std::size_t requested = 0;
};

nlohmann::json to_json(const OverlapScore& score, bool include_per_word = false);

/// Mean percentage of shared n-nearest neighbours over the targets present in
/// both sets. Throws InsufficientDataError when no target is covered.
OverlapScore embedding_overlap(const EmbeddingSet& a, const EmbeddingSet& b, std::span<const std::string> targets,
                               std::size_t n = kDefaultNeighborCount);

}  // namespace corpsim
