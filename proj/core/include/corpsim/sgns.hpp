#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpsim/corpus_io.hpp"
#include "corpsim/embed.hpp"

namespace corpsim {

/// Skip-gram negative-sampling hyperparameters. Input vectors are the mean of
/// a word row and its character n-gram bucket rows.
struct TrainParams {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 50;
  std::size_t epochs = 20;
  double initial_lr = 0.05;  ///< decays linearly to 0 over the whole run
  std::size_t min_count = 5;
  std::size_t minn = 3;  ///< 0 disables subwords
  std::size_t maxn = 6;
  std::size_t buckets = 100000;
  double subsample = 1e-4;
  std::uint64_t seed = 1;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

nlohmann::json to_json(const TrainParams& p);
/// Reads any subset of the fields, keeping defaults for the rest.
TrainParams train_params_from_json(const nlohmann::json& j);

inline constexpr std::size_t kNegativeTableSize = 10'000'000;

struct TrainStats {
  std::vector<double> epoch_loss;  ///< mean loss per (centre, context) update
  std::size_t vocab_size = 0;
  std::size_t corpus_tokens = 0;
  std::uint64_t corpus_hash = 0;
};

/// Sequential, seeded training. Same stream + params => identical vectors.
/// Throws TrainError when no token reaches min_count.
EmbeddingSet train_embeddings(const TokenStream& stream, const TrainParams& params, TrainStats* stats = nullptr);
EmbeddingSet train_embeddings(std::span<const std::string> tokens, const TrainParams& params,
                              TrainStats* stats = nullptr);

/// Character n-grams of "<word>" for n in [minn, maxn], counted in code points.
std::vector<std::string> char_ngrams(std::string_view word, std::size_t minn, std::size_t maxn);
/// Bucket of a subword: FNV-1a 64 of its bytes modulo `buckets`.
std::size_t subword_bucket(std::string_view ngram, std::size_t buckets) noexcept;

/// Writes the TrainParams and corpus provenance next to an embedding file.
void save_training_sidecar(const std::filesystem::path& path, const TrainParams& params, const TrainStats& stats);

namespace sgns_detail {

template <typename Real>
Real log_sigmoid_loss(Real z) {
  // -log(sigmoid(z)), stable for large |z|.
  return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

template <typename Real>
Real sigmoid(Real z) {
  return z >= 0 ? Real(1) / (Real(1) + std::exp(-z)) : std::exp(z) / (Real(1) + std::exp(z));
}

}  // namespace sgns_detail

/// One negative-sampling step for a single centre/context observation.
///
/// rows[0] is the output row of the observed context, rows[1..] the sampled
/// negatives. Returns the loss
///   -log s(u_0.h) - sum_j log s(-u_j.h)
/// evaluated before any update. Adds -lr * dLoss/dh to `grad_hidden` and
/// moves every output row by -lr * dLoss/du_j in place. With lr = 1 the
/// accumulated grad_hidden and the row deltas are the exact negative gradient.
template <typename Real>
Real negative_sampling_step(std::span<const Real> hidden, std::span<Real* const> rows, Real lr,
                            std::span<Real> grad_hidden) {
  const std::size_t dim = hidden.size();
  Real loss = 0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    Real* u = rows[j];
    const Real label = j == 0 ? Real(1) : Real(0);
    Real score = 0;
    for (std::size_t i = 0; i < dim; ++i) score += u[i] * hidden[i];
    loss += sgns_detail::log_sigmoid_loss(j == 0 ? score : -score);
    const Real g = lr * (label - sgns_detail::sigmoid(score));
    for (std::size_t i = 0; i < dim; ++i) grad_hidden[i] += g * u[i];
    for (std::size_t i = 0; i < dim; ++i) u[i] += g * hidden[i];
  }
  return loss;
}

}  // namespace corpsim
