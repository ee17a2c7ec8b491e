#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpsim/corpus_io.hpp"
#include "corpsim/features.hpp"

namespace corpsim {

/// Midranks of a vector, stored doubled so that tied ranks stay integral.
struct RankedVector {
  std::vector<std::int64_t> twice_ranks;
  std::uint64_t vocab_id = 0;

  std::size_t size() const noexcept { return twice_ranks.size(); }
};

RankedVector rank_vector(std::span<const std::uint64_t> values);
RankedVector rank_vector(std::span<const double> values);
RankedVector rank_vector(const FrequencyVector& v);

/// Pearson correlation of two rank vectors.
/// Throws VocabMismatchError on a length or vocabulary mismatch and
/// DegenerateVectorError when either side is constant.
double rho_from_ranks(const RankedVector& x, const RankedVector& y);

/// Spearman's rho with midrank tie handling. Requires equal lengths >= 2.
double spearman_rho(std::span<const std::uint64_t> x, std::span<const std::uint64_t> y);
double spearman_rho(std::span<const double> x, std::span<const double> y);
double spearman_rho(const FrequencyVector& x, const FrequencyVector& y);

enum class PairMode { Cross, Within };

struct PairSample {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

inline constexpr std::size_t kDefaultPairCount = 200;
inline constexpr std::size_t kDefaultMinPairs = 10;

/// Draws min(count, available) distinct pairs without replacement, ordered by
/// pair index. Within mode yields unordered pairs (a < b) from one set of n_a
/// items and ignores n_b. Throws InsufficientDataError when fewer than
/// `min_pairs` pairs exist.
PairSample sample_chunk_pairs(std::size_t n_a, std::size_t n_b, std::size_t count, std::uint64_t seed,
                              PairMode mode, std::size_t min_pairs = kDefaultMinPairs);

struct SimilarityOptions {
  std::size_t pairs = kDefaultPairCount;
  std::uint64_t seed = 0;
  std::size_t min_pairs = kDefaultMinPairs;
};

struct SimilarityEstimate {
  double mean_rho = 0.0;
  double sd_rho = 0.0;  ///< sample standard deviation over the scored pairs
  std::size_t n_pairs = 0;
  std::size_t requested_pairs = 0;
  std::size_t skipped_pairs = 0;
  std::uint64_t seed = 0;
  std::string corpus_a;
  std::string corpus_b;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const SimilarityEstimate& e);

/// Scores the given pairs, skipping degenerate ones with a warning. Throws
/// DegenerateVectorError if every pair is degenerate.
SimilarityEstimate estimate_from_pairs(std::span<const FrequencyVector> a, std::span<const FrequencyVector> b,
                                       const PairSample& sample);

/// Mean Spearman's rho over sampled cross-corpus chunk pairs.
SimilarityEstimate corpus_similarity(std::span<const Chunk> chunks_a, std::span<const Chunk> chunks_b,
                                     const FeatureVocabulary& vocab, const SimilarityOptions& options = {});
SimilarityEstimate corpus_similarity(std::span<const FrequencyVector> a, std::span<const FrequencyVector> b,
                                     const SimilarityOptions& options = {});

/// Mean Spearman's rho over sampled pairs of distinct chunks of one corpus.
SimilarityEstimate corpus_homogeneity(std::span<const Chunk> chunks, const FeatureVocabulary& vocab,
                                      const SimilarityOptions& options = {});
SimilarityEstimate corpus_homogeneity(std::span<const FrequencyVector> vectors,
                                      const SimilarityOptions& options = {});

/// (x - mean) / population sd. Throws DegenerateVectorError for fewer than
/// two values or zero variance.
std::vector<double> zscore_standardize(std::span<const double> values);

}  // namespace corpsim
