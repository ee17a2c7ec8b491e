#include "corpsim/corpus_io.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <fstream>
#include <sstream>

#include "corpsim/errors.hpp"

namespace corpsim {

std::string_view to_string(FeatureType type) noexcept {
  switch (type) {
    case FeatureType::W1: return "W1";
    case FeatureType::C2: return "C2";
    case FeatureType::C4: return "C4";
  }
  return "W1";
}

FeatureType parse_feature_type(std::string_view text) {
  if (text == "W1") return FeatureType::W1;
  if (text == "C2") return FeatureType::C2;
  if (text == "C4") return FeatureType::C4;
  throw ConfigError("unknown feature type '" + std::string(text) + "' (expected W1, C2 or C4)");
}

int gram_order(FeatureType type) noexcept {
  switch (type) {
    case FeatureType::W1: return 0;
    case FeatureType::C2: return 2;
    case FeatureType::C4: return 4;
  }
  return 0;
}

// ---------------------------------------------------------------- languages

namespace {
constexpr std::string_view kBundledLanguages =
    "ara\tC4\ndeu\tC4\nell\tW1\nfas\tW1\nfin\tC4\nfra\tW1\nind\tC4\nita\tW1\n"
    "jpn\tC2\nkor\tC4\nnld\tW1\npol\tW1\npor\tC4\nrus\tC4\nspa\tC4\nswe\tC4\ntur\tC4\n";
}  // namespace

LanguageTable LanguageTable::defaults() { return parse(kBundledLanguages); }

LanguageTable LanguageTable::parse(std::string_view text) {
  LanguageTable table;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw FormatError("expected lang_code<TAB>feature_type", line_no);
    }
    const auto code = line.substr(0, tab);
    FeatureType type;
    try {
      type = parse_feature_type(line.substr(tab + 1));
    } catch (const ConfigError& e) {
      throw FormatError(e.what(), line_no);
    }
    table.entries_.insert_or_assign(std::string(code), type);
  }
  return table;
}

LanguageTable LanguageTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open language table " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

LangConfig LanguageTable::lookup(std::string_view lang_code) const {
  const auto it = entries_.find(lang_code);
  if (it == entries_.end()) {
    throw ConfigError("no feature type configured for language '" + std::string(lang_code) + "'");
  }
  return LangConfig{it->first, it->second};
}

bool LanguageTable::contains(std::string_view lang_code) const {
  return entries_.find(lang_code) != entries_.end();
}

// ---------------------------------------------------------------- tokenizer

namespace {

void validate_utf8(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t at = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) throw IngestError("invalid UTF-8 at byte offset " + std::to_string(at));
  }
}

bool is_ascii(std::string_view text) {
  for (unsigned char c : text) {
    if (c >= 0x80) return false;
  }
  return true;
}

void tokenize_ascii(std::string_view text, std::vector<std::string>& out) {
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      current.push_back(ch);
    } else if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
}

bool is_token_char(UChar32 c) {
  return (U_GET_GC_MASK(c) & (U_GC_L_MASK | U_GC_M_MASK | U_GC_ND_MASK)) != 0;
}

void tokenize_unicode(std::string_view text, std::vector<std::string>& out) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw IngestError("ICU NFC normalizer unavailable");

  auto str = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString composed = nfc->normalize(str, status);
  composed.foldCase(U_FOLD_CASE_DEFAULT);
  // Folding can decompose (e.g. U+0130), so recompose afterwards.
  icu::UnicodeString folded = nfc->normalize(composed, status);
  if (U_FAILURE(status)) throw IngestError("Unicode normalization failed");

  std::string current;
  const int32_t n = folded.length();
  for (int32_t i = 0; i < n;) {
    const UChar32 c = folded.char32At(i);
    i += U16_LENGTH(c);
    if (is_token_char(c)) {
      char buf[4];
      int32_t len = 0;
      UBool error = false;
      U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, 4, c, error);
      (void)error;
      current.append(buf, static_cast<std::size_t>(len));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
}

void tokenize_into(std::string_view text, std::vector<std::string>& out) {
  if (is_ascii(text)) {
    tokenize_ascii(text, out);
    return;
  }
  validate_utf8(text);
  tokenize_unicode(text, out);
}

}  // namespace

TokenStream normalize_and_tokenize(std::string_view raw_text, const LangConfig& /*config*/) {
  TokenStream stream;
  tokenize_into(raw_text, stream.tokens);
  return stream;
}

TokenStream tokenize_file(const std::filesystem::path& path, const LangConfig& config,
                          std::optional<std::size_t> max_tokens) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus " + path.string());
  TokenStream stream;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      tokenize_into(line, stream.tokens);
    } catch (const IngestError& e) {
      throw IngestError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (max_tokens && stream.tokens.size() >= *max_tokens) {
      stream.tokens.resize(*max_tokens);
      break;
    }
  }
  (void)config;
  return stream;
}

// ---------------------------------------------------------------- chunks

std::vector<Chunk> chunk_corpus(std::span<const std::string> tokens, std::size_t chunk_size,
                                std::string_view source_id) {
  if (chunk_size == 0) throw ConfigError("chunk size must be at least 1");
  const std::size_t count = tokens.size() / chunk_size;
  std::vector<Chunk> chunks;
  chunks.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto first = tokens.begin() + static_cast<std::ptrdiff_t>(i * chunk_size);
    chunks.push_back(Chunk{{first, first + static_cast<std::ptrdiff_t>(chunk_size)},
                           std::string(source_id), i});
  }
  return chunks;
}

std::vector<Chunk> chunk_corpus(const TokenStream& stream, std::size_t chunk_size,
                                std::string_view source_id) {
  return chunk_corpus(std::span<const std::string>(stream.tokens), chunk_size, source_id);
}

// ---------------------------------------------------------------- grams

std::uint64_t GramBag::total() const noexcept {
  std::uint64_t sum = 0;
  for (const auto& [gram, count] : counts) sum += count;
  return sum;
}

GramBag extract_grams(std::span<const std::string> tokens, FeatureType type) {
  GramBag bag;
  bag.feature_type = type;
  for_each_gram(tokens, type, [&](std::string_view gram) { ++bag.counts[std::string(gram)]; });
  return bag;
}

GramBag extract_grams(const Chunk& chunk, FeatureType type) {
  if (chunk.tokens.empty()) throw FeatureError("cannot extract grams from an empty chunk");
  return extract_grams(std::span<const std::string>(chunk.tokens), type);
}

}  // namespace corpsim
