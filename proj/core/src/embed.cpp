#include "corpsim/embed.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "corpsim/errors.hpp"
#include "corpsim/hash.hpp"

namespace corpsim {

std::size_t EmbeddingSet::Hash::operator()(std::string_view s) const noexcept {
  return static_cast<std::size_t>(fnv1a64(s));
}

EmbeddingSet::EmbeddingSet(std::size_t dim, std::string source_label)
    : dim_(dim), source_label_(std::move(source_label)) {
  if (dim == 0) throw FormatError("embedding dimension must be positive");
}

void EmbeddingSet::add(std::string token, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw FormatError("vector for '" + token + "' has " + std::to_string(vector.size()) + " values, expected " +
                      std::to_string(dim_));
  }
  for (double v : vector) {
    if (!std::isfinite(v)) throw FormatError("non-finite value in vector for '" + token + "'");
  }
  if (index_.contains(token)) throw FormatError("duplicate token '" + token + "'");
  index_.emplace(token, tokens_.size());
  tokens_.push_back(std::move(token));
  values_.insert(values_.end(), vector.begin(), vector.end());
}

bool EmbeddingSet::contains(std::string_view token) const { return index_.find(token) != index_.end(); }

std::ptrdiff_t EmbeddingSet::index_of(std::string_view token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::span<const double> EmbeddingSet::vector(std::size_t row) const {
  return std::span<const double>(values_).subspan(row * dim_, dim_);
}

std::span<const double> EmbeddingSet::vector(std::string_view token) const {
  const auto i = index_of(token);
  if (i < 0) throw OovError("token '" + std::string(token) + "' not in embedding set");
  return vector(static_cast<std::size_t>(i));
}

// ---------------------------------------------------------------- text format

namespace {

bool parse_size(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

bool parse_real(std::string_view s, double& out) {
  if (s.empty()) return false;
  // strtod accepts the exponent and inf/nan spellings; the caller rejects non-finite values.
  std::string buf(s);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size();
}

}  // namespace

EmbeddingSet parse_embeddings(std::string_view text, std::string source_label) {
  std::size_t line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (text.empty()) return false;
    const auto nl = text.find('\n');
    line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw FormatError("missing header", 1);
  const auto sp = line.find(' ');
  std::size_t count = 0, dim = 0;
  if (sp == std::string_view::npos || !parse_size(line.substr(0, sp), count) ||
      !parse_size(line.substr(sp + 1), dim)) {
    throw FormatError("header must be two integers: vocabulary size and dimension", 1);
  }
  if (dim == 0) throw FormatError("dimension must be positive", 1);

  EmbeddingSet embs(dim, std::move(source_label));
  std::vector<double> values(dim);
  while (next_line(line)) {
    if (line.empty() && text.empty()) break;
    if (embs.size() == count) {
      throw FormatError("more vectors than the " + std::to_string(count) + " announced in the header", line_no);
    }
    // word2vec tools commonly emit one trailing space per row.
    if (!line.empty() && line.back() == ' ') line.remove_suffix(1);
    const auto tok_end = line.find(' ');
    if (tok_end == 0 || line.empty()) throw FormatError("row has no token", line_no);
    if (tok_end == std::string_view::npos) throw FormatError("row has no values", line_no);
    std::string token(line.substr(0, tok_end));
    std::string_view rest = line.substr(tok_end + 1);
    std::size_t got = 0;
    while (!rest.empty()) {
      const auto next = rest.find(' ');
      const auto field = rest.substr(0, next);
      if (got == dim) {
        throw FormatError("row has more than " + std::to_string(dim) + " values", line_no);
      }
      if (!parse_real(field, values[got])) {
        throw FormatError("cannot parse value '" + std::string(field) + "'", line_no);
      }
      if (!std::isfinite(values[got])) throw FormatError("non-finite value", line_no);
      ++got;
      if (next == std::string_view::npos) break;
      rest.remove_prefix(next + 1);
      if (rest.empty()) throw FormatError("empty field", line_no);
    }
    if (got != dim) {
      throw FormatError("row has " + std::to_string(got) + " values, expected " + std::to_string(dim), line_no);
    }
    try {
      embs.add(std::move(token), values);
    } catch (const FormatError& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  if (embs.size() != count) {
    throw FormatError("header announces " + std::to_string(count) + " vectors, found " +
                          std::to_string(embs.size()),
                      line_no + 1);
  }
  return embs;
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embeddings " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_embeddings(buf.str(), path.filename().string());
}

std::string format_embeddings(const EmbeddingSet& embs) {
  if (embs.empty()) throw FormatError("refusing to write an empty embedding set");
  std::string out = std::to_string(embs.size()) + " " + std::to_string(embs.dim()) + "\n";
  char buf[32];
  for (std::size_t r = 0; r < embs.size(); ++r) {
    const auto& token = embs.tokens()[r];
    if (token.empty() || token.find_first_of(" \t\n\r\v\f") != std::string::npos) {
      throw FormatError("token '" + token + "' cannot be represented in the text format");
    }
    out += token;
    for (double v : embs.vector(r)) {
      std::snprintf(buf, sizeof buf, " %.9g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void save_embeddings(const EmbeddingSet& embs, const std::filesystem::path& path) {
  const std::string text = format_embeddings(embs);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write embeddings " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------- targets

namespace {

bool all_digits(std::string_view token) {
  const auto* s = reinterpret_cast<const uint8_t*>(token.data());
  const auto len = static_cast<int32_t>(token.size());
  for (int32_t i = 0; i < len;) {
    UChar32 c;
    U8_NEXT(s, i, len, c);
    if (c < 0 || u_charType(c) != U_DECIMAL_DIGIT_NUMBER) return false;
  }
  return !token.empty();
}

}  // namespace

TargetWords select_target_words(const TokenStream& background, std::size_t k) {
  if (background.empty()) throw FeatureError("background corpus is empty");
  std::unordered_map<std::string_view, std::uint64_t> counts;
  for (const auto& t : background.tokens) ++counts[t];
  std::vector<std::pair<std::string_view, std::uint64_t>> ranked;
  for (const auto& [tok, c] : counts) {
    if (!all_digits(tok)) ranked.emplace_back(tok, c);
  }
  const std::size_t keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                    [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second : a.first < b.first;
                    });
  TargetWords out;
  for (std::size_t i = 0; i < keep; ++i) out.words.emplace_back(ranked[i].first);
  if (keep < k) {
    out.warnings.push_back("background has only " + std::to_string(keep) + " eligible tokens; requested " +
                           std::to_string(k));
  }
  return out;
}

// ---------------------------------------------------------------- neighbours

NeighborIndex::NeighborIndex(const EmbeddingSet& embs) : embs_(&embs) {
  const std::size_t d = embs.dim();
  unit_.resize(embs.size() * d);
  nonzero_.resize(embs.size());
  for (std::size_t r = 0; r < embs.size(); ++r) {
    const auto v = embs.vector(r);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    nonzero_[r] = norm > 0.0;
    for (std::size_t i = 0; i < d; ++i) unit_[r * d + i] = nonzero_[r] ? v[i] / norm : 0.0;
  }
}

std::vector<std::string> NeighborIndex::query(std::string_view word, std::size_t n) const {
  const auto q = embs_->index_of(word);
  if (q < 0) throw OovError("token '" + std::string(word) + "' not in embedding set");
  if (embs_->size() <= n) {
    throw InsufficientDataError("embedding vocabulary of " + std::to_string(embs_->size()) +
                                " cannot supply " + std::to_string(n) + " neighbours");
  }
  const std::size_t d = embs_->dim();
  const auto qrow = static_cast<std::size_t>(q);
  const double* qv = unit_.data() + qrow * d;
  const auto& tokens = embs_->tokens();

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(embs_->size());
  for (std::size_t r = 0; r < embs_->size(); ++r) {
    if (r == qrow || !nonzero_[r]) continue;
    const double* rv = unit_.data() + r * d;
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += qv[i] * rv[i];
    scored.emplace_back(dot, r);
  }
  const auto better = [&](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : tokens[a.second] < tokens[b.second];
  };
  const std::size_t keep = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
  std::vector<std::string> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(tokens[scored[i].second]);
  return out;
}

std::vector<std::string> nearest_neighbors(const EmbeddingSet& embs, std::string_view word, std::size_t n) {
  return NeighborIndex(embs).query(word, n);
}

nlohmann::json to_json(const OverlapScore& score, bool include_per_word) {
  nlohmann::json j{{"mean_percent", score.mean_percent},
                   {"covered", score.covered},
                   {"requested", score.requested}};
  if (include_per_word) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& [w, p] : score.per_word) per.push_back({w, p});
    j["per_word"] = std::move(per);
  }
  return j;
}

OverlapScore embedding_overlap(const EmbeddingSet& a, const EmbeddingSet& b, std::span<const std::string> targets,
                               std::size_t n) {
  if (n == 0) throw ConfigError("neighbour count must be at least 1");
  const NeighborIndex ia(a), ib(b);
  OverlapScore score;
  score.requested = targets.size();
  double sum = 0.0;
  for (const auto& t : targets) {
    if (!a.contains(t) || !b.contains(t)) continue;
    const auto na = ia.query(t, n);
    const auto nb = ib.query(t, n);
    const std::unordered_set<std::string_view> in_a(na.begin(), na.end());
    std::size_t shared = 0;
    for (const auto& w : nb) shared += in_a.contains(w) ? 1 : 0;
    const double pct = 100.0 * static_cast<double>(shared) / static_cast<double>(n);
    score.per_word.emplace_back(t, pct);
    sum += pct;
  }
  score.covered = score.per_word.size();
  if (score.covered == 0) throw InsufficientDataError("no target word is present in both embedding sets");
  score.mean_percent = sum / static_cast<double>(score.covered);
  return score;
}

}  // namespace corpsim
