#pragma once

// Seeded synthetic corpora for exercising the similarity and embedding code.
//
// A Source owns a lexicon partition into topic clusters plus its own Zipfian
// frequency ordering. A sentence picks a topic, then draws each word from the
// topic cluster (probability topic_prob) or from the source-wide Zipf law.
// A Register is a weighted mixture of sources chosen per sentence.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "corpsim/rng.hpp"

namespace corpsim::testing {

/// n distinct lower-case pseudo-words; `salt` shifts the syllable inventory so
/// two lexicons with different salts share no word.
std::vector<std::string> make_lexicon(std::size_t n, std::uint32_t salt = 0);

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double exponent);
  std::size_t operator()(Rng& rng) const;
  std::size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

struct SourceSpec {
  std::size_t cluster_size = 20;
  double topic_prob = 0.7;
  double zipf_exponent = 1.0;
  std::size_t sentence_length = 12;
  std::uint64_t structure_seed = 1;  ///< fixes the partition and frequency order
};

class Source {
 public:
  Source(std::vector<std::string> lexicon, SourceSpec spec);

  void sentence(Rng& rng, std::vector<std::string>& out) const;
  const std::vector<std::string>& lexicon() const { return lexicon_; }
  /// Cluster id of each lexicon entry.
  const std::vector<std::size_t>& cluster_of() const { return cluster_of_; }

 private:
  std::vector<std::string> lexicon_;
  SourceSpec spec_;
  std::vector<std::size_t> frequency_order_;
  std::vector<std::vector<std::size_t>> clusters_;
  std::vector<std::size_t> cluster_of_;
  ZipfSampler global_;
  ZipfSampler within_;
};

struct Register {
  std::vector<const Source*> sources;
  std::vector<double> weights;

  std::vector<std::string> generate(std::size_t n_tokens, std::uint64_t seed) const;
};

/// Writes tokens as text, `per_line` tokens per line.
void write_corpus(const std::filesystem::path& path, std::span<const std::string> tokens, std::size_t per_line = 20);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace corpsim::testing
