#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpsim/corpus_io.hpp"

namespace corpsim {

inline constexpr std::size_t kDefaultVocabSize = 5000;

/// Top-k grams of a background corpus, ranked by descending frequency with
/// ties in ascending byte order. Immutable once built.
class FeatureVocabulary {
 public:
  FeatureVocabulary(std::vector<std::string> grams, FeatureType type, std::size_t requested_k,
                    std::string source_label);

  const std::vector<std::string>& grams() const noexcept { return grams_; }
  FeatureType feature_type() const noexcept { return type_; }
  std::size_t size() const noexcept { return grams_.size(); }
  std::size_t requested_k() const noexcept { return requested_k_; }
  const std::string& source_label() const noexcept { return source_label_; }
  /// Content hash over feature type and gram list; binds vectors to this vocabulary.
  std::uint64_t id() const noexcept { return id_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

  /// Position of `gram`, or -1.
  std::ptrdiff_t index_of(std::string_view gram) const;

  /// `#corpsim-vocab<TAB>type<TAB>count` then one gram per line.
  std::string serialize() const;
  static FeatureVocabulary parse(std::string_view text, std::string source_label = "file");
  void save(const std::filesystem::path& path) const;
  static FeatureVocabulary load(const std::filesystem::path& path);

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept;
  };

  std::vector<std::string> grams_;
  FeatureType type_;
  std::size_t requested_k_;
  std::string source_label_;
  std::uint64_t id_ = 0;
  std::vector<std::string> warnings_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
};

/// Raw gram counts of one chunk, aligned with a FeatureVocabulary.
struct FrequencyVector {
  std::vector<std::uint64_t> counts;
  std::uint64_t vocab_id = 0;
};

/// Throws FeatureError when the background stream is empty.
FeatureVocabulary build_feature_vocabulary(const TokenStream& background, const LangConfig& config,
                                           std::size_t k = kDefaultVocabSize,
                                           std::string source_label = "background");

/// Ranks an explicit gram-count table under the vocabulary ordering rule.
FeatureVocabulary vocabulary_from_counts(const std::unordered_map<std::string, std::uint64_t>& counts,
                                         FeatureType type, std::size_t k, std::string source_label);

FrequencyVector vectorize(std::span<const std::string> tokens, const FeatureVocabulary& vocab);
FrequencyVector vectorize(const Chunk& chunk, const FeatureVocabulary& vocab);
std::vector<FrequencyVector> vectorize_all(std::span<const Chunk> chunks, const FeatureVocabulary& vocab);

}  // namespace corpsim
