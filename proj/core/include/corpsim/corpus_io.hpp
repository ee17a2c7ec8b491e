#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace corpsim {

/// Feature families used for corpus-similarity vectors.
enum class FeatureType {
  W1,  ///< word unigrams
  C2,  ///< character bigrams
  C4,  ///< character 4-grams
};

std::string_view to_string(FeatureType type) noexcept;
/// Parses "W1", "C2" or "C4"; throws ConfigError otherwise.
FeatureType parse_feature_type(std::string_view text);
/// Character n-gram order for C2/C4, 0 for W1.
int gram_order(FeatureType type) noexcept;

struct LangConfig {
  std::string lang_code;
  FeatureType feature_type = FeatureType::W1;
};

/// lang_code -> feature type table.
class LanguageTable {
 public:
  /// The bundled mapping for the 17 evaluated languages.
  static LanguageTable defaults();
  /// Reads `lang_code<TAB>feature_type` lines. Blank lines and lines starting
  /// with '#' are skipped. Throws FormatError with the offending line.
  static LanguageTable parse(std::string_view text);
  static LanguageTable load(const std::filesystem::path& path);

  /// Throws ConfigError for unknown languages.
  LangConfig lookup(std::string_view lang_code) const;
  bool contains(std::string_view lang_code) const;
  const std::map<std::string, FeatureType, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, FeatureType, std::less<>> entries_;
};

struct TokenStream {
  std::vector<std::string> tokens;

  std::size_t token_count() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
};

struct Chunk {
  std::vector<std::string> tokens;
  std::string source_id;
  std::size_t index = 0;

  std::size_t size() const noexcept { return tokens.size(); }
};

struct GramBag {
  std::unordered_map<std::string, std::uint64_t> counts;
  FeatureType feature_type = FeatureType::W1;

  std::uint64_t total() const noexcept;
};

/// NFC-normalizes and case-folds UTF-8 text, then splits it into maximal runs
/// of letters, marks and decimal digits. Everything else separates tokens.
/// Throws IngestError on malformed UTF-8.
TokenStream normalize_and_tokenize(std::string_view raw_text, const LangConfig& config);

/// Streams a UTF-8 file line by line through normalize_and_tokenize, stopping
/// once `max_tokens` tokens have been collected (when given).
TokenStream tokenize_file(const std::filesystem::path& path, const LangConfig& config,
                          std::optional<std::size_t> max_tokens = std::nullopt);

inline constexpr std::size_t kDefaultChunkSize = 20000;

/// Consecutive, non-overlapping chunks of exactly chunk_size tokens. The
/// trailing remainder is dropped. Throws ConfigError for chunk_size == 0.
std::vector<Chunk> chunk_corpus(std::span<const std::string> tokens,
                                std::size_t chunk_size = kDefaultChunkSize,
                                std::string_view source_id = {});
std::vector<Chunk> chunk_corpus(const TokenStream& stream,
                                std::size_t chunk_size = kDefaultChunkSize,
                                std::string_view source_id = {});

/// Calls `fn(std::string_view gram)` for every gram occurrence in the token
/// sequence. Character grams slide over the tokens joined by single spaces
/// and are measured in code points.
template <typename Fn>
void for_each_gram(std::span<const std::string> tokens, FeatureType type, Fn&& fn);

GramBag extract_grams(std::span<const std::string> tokens, FeatureType type);
/// Throws FeatureError for an empty chunk.
GramBag extract_grams(const Chunk& chunk, FeatureType type);

// ---------------------------------------------------------------------------

namespace detail {
/// Byte length of the UTF-8 sequence introduced by `lead`.
inline std::size_t utf8_len(unsigned char lead) noexcept {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  return 4;
}
}  // namespace detail

template <typename Fn>
void for_each_gram(std::span<const std::string> tokens, FeatureType type, Fn&& fn) {
  const int n = gram_order(type);
  if (n == 0) {
    for (const auto& t : tokens) fn(std::string_view(t));
    return;
  }
  std::string joined;
  std::size_t bytes = 0;
  for (const auto& t : tokens) bytes += t.size() + 1;
  joined.reserve(bytes);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) joined.push_back(' ');
    joined += tokens[i];
  }
  std::vector<std::size_t> starts;
  starts.reserve(joined.size() + 1);
  for (std::size_t pos = 0; pos < joined.size();
       pos += detail::utf8_len(static_cast<unsigned char>(joined[pos]))) {
    starts.push_back(pos);
  }
  starts.push_back(joined.size());
  const std::size_t points = starts.size() - 1;
  const std::string_view view(joined);
  for (std::size_t i = 0; i + n <= points; ++i) {
    fn(view.substr(starts[i], starts[i + n] - starts[i]));
  }
}

}  // namespace corpsim
