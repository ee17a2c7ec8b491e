#include "corpsim/features.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "corpsim/errors.hpp"
#include "corpsim/hash.hpp"

namespace corpsim {

std::size_t FeatureVocabulary::Hash::operator()(std::string_view s) const noexcept {
  return static_cast<std::size_t>(fnv1a64(s));
}

FeatureVocabulary::FeatureVocabulary(std::vector<std::string> grams, FeatureType type,
                                     std::size_t requested_k, std::string source_label)
    : grams_(std::move(grams)),
      type_(type),
      requested_k_(requested_k),
      source_label_(std::move(source_label)) {
  index_.reserve(grams_.size());
  for (std::size_t i = 0; i < grams_.size(); ++i) {
    if (!index_.emplace(grams_[i], i).second) {
      throw FeatureError("duplicate gram in vocabulary: '" + grams_[i] + "'");
    }
  }
  id_ = fnv1a64(serialize());
}

std::ptrdiff_t FeatureVocabulary::index_of(std::string_view gram) const {
  const auto it = index_.find(gram);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::string FeatureVocabulary::serialize() const {
  std::string out = "#corpsim-vocab\t";
  out += to_string(type_);
  out += '\t';
  out += std::to_string(grams_.size());
  out += '\n';
  for (const auto& g : grams_) {
    out += g;
    out += '\n';
  }
  return out;
}

FeatureVocabulary FeatureVocabulary::parse(std::string_view text, std::string source_label) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    if (nl == std::string_view::npos) {
      throw FormatError("missing final newline", lines.size() + 1);
    }
    lines.push_back(text.substr(0, nl));
    text.remove_prefix(nl + 1);
  }
  if (lines.empty()) throw FormatError("empty vocabulary file", 1);
  const auto header = lines.front();
  constexpr std::string_view magic = "#corpsim-vocab\t";
  if (header.substr(0, magic.size()) != magic) throw FormatError("missing #corpsim-vocab header", 1);
  const auto rest = header.substr(magic.size());
  const auto tab = rest.find('\t');
  if (tab == std::string_view::npos) throw FormatError("header needs feature type and count", 1);
  FeatureType type;
  try {
    type = parse_feature_type(rest.substr(0, tab));
  } catch (const ConfigError& e) {
    throw FormatError(e.what(), 1);
  }
  std::size_t count = 0;
  const auto count_text = rest.substr(tab + 1);
  if (count_text.empty() ||
      !std::all_of(count_text.begin(), count_text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw FormatError("invalid gram count", 1);
  }
  count = std::stoull(std::string(count_text));
  if (lines.size() - 1 != count) {
    throw FormatError("header announces " + std::to_string(count) + " grams, found " +
                          std::to_string(lines.size() - 1),
                      lines.size() - 1 < count ? lines.size() + 1 : count + 2);
  }
  std::vector<std::string> grams;
  grams.reserve(count);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) throw FormatError("empty gram", i + 1);
    grams.emplace_back(lines[i]);
  }
  try {
    return FeatureVocabulary(std::move(grams), type, count, std::move(source_label));
  } catch (const FeatureError& e) {
    throw FormatError(e.what());
  }
}

void FeatureVocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary " + path.string());
  out << serialize();
  if (!out) throw IoError("write failed for " + path.string());
}

FeatureVocabulary FeatureVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vocabulary " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.filename().string());
}

FeatureVocabulary vocabulary_from_counts(const std::unordered_map<std::string, std::uint64_t>& counts,
                                         FeatureType type, std::size_t k, std::string source_label) {
  if (k == 0) throw ConfigError("vocabulary size k must be at least 1");
  std::vector<std::pair<std::string_view, std::uint64_t>> ranked;
  ranked.reserve(counts.size());
  for (const auto& [gram, count] : counts) ranked.emplace_back(gram, count);
  const auto by_rank = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  const std::size_t keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                    by_rank);
  std::vector<std::string> grams;
  grams.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) grams.emplace_back(ranked[i].first);
  FeatureVocabulary vocab(std::move(grams), type, k, std::move(source_label));
  if (keep < k) {
    vocab.add_warning("background has only " + std::to_string(keep) + " distinct grams; requested " +
                      std::to_string(k));
  }
  return vocab;
}

FeatureVocabulary build_feature_vocabulary(const TokenStream& background, const LangConfig& config,
                                           std::size_t k, std::string source_label) {
  if (background.empty()) throw FeatureError("background corpus is empty");
  std::unordered_map<std::string, std::uint64_t> counts;
  for_each_gram(std::span<const std::string>(background.tokens), config.feature_type,
                [&](std::string_view gram) { ++counts[std::string(gram)]; });
  return vocabulary_from_counts(counts, config.feature_type, k, std::move(source_label));
}

FrequencyVector vectorize(std::span<const std::string> tokens, const FeatureVocabulary& vocab) {
  if (vocab.size() == 0) throw FeatureError("cannot vectorize against an empty vocabulary");
  FrequencyVector v;
  v.vocab_id = vocab.id();
  v.counts.assign(vocab.size(), 0);
  for_each_gram(tokens, vocab.feature_type(), [&](std::string_view gram) {
    const auto i = vocab.index_of(gram);
    if (i >= 0) ++v.counts[static_cast<std::size_t>(i)];
  });
  return v;
}

FrequencyVector vectorize(const Chunk& chunk, const FeatureVocabulary& vocab) {
  return vectorize(std::span<const std::string>(chunk.tokens), vocab);
}

std::vector<FrequencyVector> vectorize_all(std::span<const Chunk> chunks, const FeatureVocabulary& vocab) {
  std::vector<FrequencyVector> out;
  out.reserve(chunks.size());
  for (const auto& c : chunks) out.push_back(vectorize(c, vocab));
  return out;
}

}  // namespace corpsim
