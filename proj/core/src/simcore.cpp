#include "corpsim/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>

#include "corpsim/errors.hpp"
#include "corpsim/rng.hpp"

namespace corpsim {

namespace {

__extension__ typedef __int128 int128;

template <typename T>
RankedVector rank_values(std::span<const T> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  RankedVector r;
  r.twice_ranks.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && !(values[order[i]] < values[order[j]])) ++j;
    // Positions i..j-1 (1-based i+1..j) share the midrank (i+1+j)/2.
    const auto twice_mid = static_cast<std::int64_t>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) r.twice_ranks[order[k]] = twice_mid;
    i = j;
  }
  return r;
}

}  // namespace

RankedVector rank_vector(std::span<const std::uint64_t> values) { return rank_values(values); }

RankedVector rank_vector(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw DegenerateVectorError("non-finite value in rank input");
  }
  return rank_values(values);
}

RankedVector rank_vector(const FrequencyVector& v) {
  RankedVector r = rank_values(std::span<const std::uint64_t>(v.counts));
  r.vocab_id = v.vocab_id;
  return r;
}

double rho_from_ranks(const RankedVector& x, const RankedVector& y) {
  if (x.size() != y.size()) {
    throw VocabMismatchError("rank vectors differ in length (" + std::to_string(x.size()) + " vs " +
                             std::to_string(y.size()) + ")");
  }
  if (x.vocab_id != y.vocab_id) throw VocabMismatchError("vectors were built from different vocabularies");
  const std::size_t n = x.size();
  if (n < 2) throw DegenerateVectorError("need at least two entries for a rank correlation");
  int128 sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int128 a = x.twice_ranks[i];
    const int128 b = y.twice_ranks[i];
    sx += a;
    sy += b;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  const int128 nn = static_cast<int128>(n);
  const int128 cov = nn * sxy - sx * sy;
  const int128 vx = nn * sxx - sx * sx;
  const int128 vy = nn * syy - sy * sy;
  if (vx == 0 || vy == 0) throw DegenerateVectorError("constant vector has no rank correlation");
  const double rho =
      static_cast<double>(cov) / std::sqrt(static_cast<double>(vx) * static_cast<double>(vy));
  return std::clamp(rho, -1.0, 1.0);
}

double spearman_rho(std::span<const std::uint64_t> x, std::span<const std::uint64_t> y) {
  if (x.size() != y.size()) throw VocabMismatchError("vectors differ in length");
  return rho_from_ranks(rank_vector(x), rank_vector(y));
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw VocabMismatchError("vectors differ in length");
  return rho_from_ranks(rank_vector(x), rank_vector(y));
}

double spearman_rho(const FrequencyVector& x, const FrequencyVector& y) {
  if (x.vocab_id != y.vocab_id) throw VocabMismatchError("vectors were built from different vocabularies");
  if (x.counts.size() != y.counts.size()) throw VocabMismatchError("vectors differ in length");
  return rho_from_ranks(rank_vector(x), rank_vector(y));
}

// ---------------------------------------------------------------- sampling

namespace {

std::pair<std::size_t, std::size_t> unrank_within(std::uint64_t index, std::size_t n) {
  // Row a holds pairs (a, a+1..n-1): n-1-a entries.
  std::size_t a = 0;
  std::uint64_t row = n - 1;
  while (index >= row) {
    index -= row;
    ++a;
    --row;
  }
  return {a, a + 1 + static_cast<std::size_t>(index)};
}

}  // namespace

PairSample sample_chunk_pairs(std::size_t n_a, std::size_t n_b, std::size_t count, std::uint64_t seed,
                              PairMode mode, std::size_t min_pairs) {
  std::uint64_t available = 0;
  if (mode == PairMode::Cross) {
    available = static_cast<std::uint64_t>(n_a) * n_b;
  } else {
    available = n_a < 2 ? 0 : static_cast<std::uint64_t>(n_a) * (n_a - 1) / 2;
  }
  if (available < min_pairs || available == 0) {
    throw InsufficientDataError("only " + std::to_string(available) + " chunk pairs available; at least " +
                                std::to_string(std::max<std::size_t>(min_pairs, 1)) + " required");
  }
  std::vector<std::uint64_t> picked;
  if (count >= available) {
    picked.resize(available);
    std::iota(picked.begin(), picked.end(), std::uint64_t{0});
  } else {
    // Floyd's algorithm: a uniform subset without materialising the population.
    Rng rng(seed);
    std::set<std::uint64_t> chosen;
    for (std::uint64_t j = available - count; j < available; ++j) {
      const std::uint64_t t = rng.uniform(j + 1);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    picked.assign(chosen.begin(), chosen.end());
  }
  PairSample sample;
  sample.pairs.reserve(picked.size());
  for (auto idx : picked) {
    if (mode == PairMode::Cross) {
      sample.pairs.emplace_back(static_cast<std::size_t>(idx / n_b), static_cast<std::size_t>(idx % n_b));
    } else {
      sample.pairs.push_back(unrank_within(idx, n_a));
    }
  }
  return sample;
}

// ---------------------------------------------------------------- estimates

nlohmann::json to_json(const SimilarityEstimate& e) {
  return nlohmann::json{{"corpus_a", e.corpus_a},
                        {"corpus_b", e.corpus_b},
                        {"mean_rho", e.mean_rho},
                        {"sd_rho", e.sd_rho},
                        {"n_pairs", e.n_pairs},
                        {"requested_pairs", e.requested_pairs},
                        {"skipped_pairs", e.skipped_pairs},
                        {"seed", e.seed},
                        {"warnings", e.warnings}};
}

SimilarityEstimate estimate_from_pairs(std::span<const FrequencyVector> a, std::span<const FrequencyVector> b,
                                       const PairSample& sample) {
  std::vector<std::optional<RankedVector>> ranked_a(a.size()), ranked_b(b.size());
  const bool same_set = a.data() == b.data() && a.size() == b.size();
  auto ranks = [](std::vector<std::optional<RankedVector>>& cache, std::span<const FrequencyVector> vs,
                  std::size_t i) -> const RankedVector& {
    if (!cache[i]) cache[i] = rank_vector(vs[i]);
    return *cache[i];
  };

  SimilarityEstimate est;
  est.requested_pairs = sample.pairs.size();
  std::vector<double> rhos;
  rhos.reserve(sample.pairs.size());
  for (const auto& [i, j] : sample.pairs) {
    if (i >= a.size() || j >= b.size()) throw InsufficientDataError("pair index out of range");
    const RankedVector& x = ranks(ranked_a, a, i);
    const RankedVector& y = same_set ? ranks(ranked_a, a, j) : ranks(ranked_b, b, j);
    try {
      rhos.push_back(rho_from_ranks(x, y));
    } catch (const DegenerateVectorError&) {
      ++est.skipped_pairs;
      est.warnings.push_back("skipped degenerate pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
  if (rhos.empty()) throw DegenerateVectorError("every sampled chunk pair was degenerate");
  est.n_pairs = rhos.size();
  double sum = 0.0;
  for (double r : rhos) sum += r;
  est.mean_rho = sum / static_cast<double>(rhos.size());
  if (rhos.size() > 1) {
    double ss = 0.0;
    for (double r : rhos) ss += (r - est.mean_rho) * (r - est.mean_rho);
    est.sd_rho = std::sqrt(ss / static_cast<double>(rhos.size() - 1));
  }
  est.mean_rho = std::clamp(est.mean_rho, -1.0, 1.0);
  return est;
}

SimilarityEstimate corpus_similarity(std::span<const FrequencyVector> a, std::span<const FrequencyVector> b,
                                     const SimilarityOptions& options) {
  if (a.empty() || b.empty()) throw InsufficientDataError("both corpora need at least one chunk");
  const auto sample = sample_chunk_pairs(a.size(), b.size(), options.pairs, options.seed, PairMode::Cross,
                                         options.min_pairs);
  auto est = estimate_from_pairs(a, b, sample);
  est.seed = options.seed;
  return est;
}

SimilarityEstimate corpus_similarity(std::span<const Chunk> chunks_a, std::span<const Chunk> chunks_b,
                                     const FeatureVocabulary& vocab, const SimilarityOptions& options) {
  if (chunks_a.empty() || chunks_b.empty()) throw InsufficientDataError("both corpora need at least one chunk");
  const auto va = vectorize_all(chunks_a, vocab);
  const auto vb = vectorize_all(chunks_b, vocab);
  auto est = corpus_similarity(va, vb, options);
  est.corpus_a = chunks_a.front().source_id;
  est.corpus_b = chunks_b.front().source_id;
  return est;
}

SimilarityEstimate corpus_homogeneity(std::span<const FrequencyVector> vectors, const SimilarityOptions& options) {
  const auto sample =
      sample_chunk_pairs(vectors.size(), 0, options.pairs, options.seed, PairMode::Within, options.min_pairs);
  auto est = estimate_from_pairs(vectors, vectors, sample);
  est.seed = options.seed;
  return est;
}

SimilarityEstimate corpus_homogeneity(std::span<const Chunk> chunks, const FeatureVocabulary& vocab,
                                      const SimilarityOptions& options) {
  if (chunks.empty()) throw InsufficientDataError("corpus has no chunks");
  const auto vs = vectorize_all(chunks, vocab);
  auto est = corpus_homogeneity(vs, options);
  est.corpus_a = est.corpus_b = chunks.front().source_id;
  return est;
}

std::vector<double> zscore_standardize(std::span<const double> values) {
  if (values.size() < 2) throw DegenerateVectorError("z-scores need at least two values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 0.0)) throw DegenerateVectorError("z-scores undefined for zero variance");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - mean) / sd);
  return out;
}

}  // namespace corpsim
