#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "corpsim/embed.hpp"
#include "corpsim/errors.hpp"
#include "corpsim/rng.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace corpsim;

namespace {

int format_error_line(std::string_view text) {
  try {
    parse_embeddings(text);
  } catch (const FormatError& e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

void add_angle(EmbeddingSet& e, const std::string& tok, double degrees) {
  const double r = degrees * M_PI / 180.0;
  const std::vector<double> v{std::cos(r), std::sin(r)};
  e.add(tok, v);
}

}  // namespace

TEST_CASE("parse well-formed text") {
  const auto e = parse_embeddings("2 3\na 1 2 3\nb 0.5 -1e-3 4\n");
  CHECK(e.dim() == 3);
  CHECK(e.size() == 2);
  CHECK(e.tokens() == std::vector<std::string>{"a", "b"});
  CHECK(e.vector("b")[1] == -1e-3);
  CHECK_THROWS_AS(e.vector("zzz"), OovError);
  // Trailing space and CRLF are tolerated.
  CHECK(parse_embeddings("1 2\r\nx 1 2 \r\n").size() == 1);
}

TEST_CASE("format errors carry line numbers") {
  CHECK(format_error_line("2 3\na 1 2 3\nb 1 2 3\nc 1 2 3\n") == 4);
  CHECK(format_error_line("2 3\na 1 2\nb 1 2 3\n") == 2);
  CHECK(format_error_line("2 3\na 1 2 3\nb 1 2 3 4\n") == 3);
  CHECK(format_error_line("2 3\na 1 2 3\na 1 2 3\n") == 3);
  CHECK(format_error_line("2 3\na 1 2 3\nb 1 nan 3\n") == 3);
  CHECK(format_error_line("2 3\na 1 x 3\n") == 2);
  CHECK(format_error_line("2 3\na 1 2 3\n") == 3);
  CHECK(format_error_line("two 3\n") == 1);
  CHECK(format_error_line("2\n") == 1);
  CHECK(format_error_line("") == 1);
  CHECK(format_error_line("1 0\n") == 1);
}

TEST_CASE("save and load round trip") {
  EmbeddingSet e(3, "t");
  e.add("alpha", std::vector<double>{0.1, -2.5, 1e-7});
  e.add("\xc3\xa9t\xc3\xa9", std::vector<double>{3.0, 0.0, -0.333333333});
  const auto dir = testing::scratch_dir("embed");
  save_embeddings(e, dir / "e.vec");
  const auto back = load_embeddings(dir / "e.vec");
  CHECK(back.tokens() == e.tokens());
  for (std::size_t r = 0; r < e.size(); ++r)
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.vector(r)[i] == doctest::Approx(e.vector(r)[i]).epsilon(1e-8));

  CHECK_THROWS_AS(format_embeddings(EmbeddingSet(3)), FormatError);
  EmbeddingSet spaced(1);
  spaced.add("a b", std::vector<double>{1.0});
  CHECK_THROWS_AS(format_embeddings(spaced), FormatError);
  CHECK_THROWS_AS(spaced.add("c", std::vector<double>{1.0, 2.0}), FormatError);
}

TEST_CASE("target words skip pure digit tokens") {
  TokenStream bg;
  for (int i = 0; i < 5; ++i) bg.tokens.emplace_back("the");
  for (int i = 0; i < 3; ++i) bg.tokens.emplace_back("cat");
  for (int i = 0; i < 9; ++i) bg.tokens.emplace_back("42");
  CHECK(select_target_words(bg, 2).words == std::vector<std::string>{"the", "cat"});
  CHECK(select_target_words(bg, 1).words == std::vector<std::string>{"the"});
  const auto more = select_target_words(bg, 5);
  CHECK(more.words.size() == 2);
  CHECK(more.warnings.size() == 1);
  CHECK_THROWS_AS(select_target_words(TokenStream{}, 2), FeatureError);
}

TEST_CASE("nearest neighbours by cosine") {
  EmbeddingSet e(2);
  e.add("q", std::vector<double>{1, 0});
  e.add("a", std::vector<double>{1, 0.01});
  e.add("b", std::vector<double>{0, 1});
  CHECK(nearest_neighbors(e, "q", 1) == std::vector<std::string>{"a"});
  CHECK_THROWS_AS(nearest_neighbors(e, "zz", 1), OovError);
  CHECK_THROWS_AS(nearest_neighbors(e, "q", 3), InsufficientDataError);

  EmbeddingSet orth(3);
  orth.add("q", std::vector<double>{1, 0, 0});
  orth.add("x", std::vector<double>{0, 1, 0});
  orth.add("y", std::vector<double>{0, 0, 1});
  orth.add("z", std::vector<double>{0.2, 0, 5});
  orth.add("zero", std::vector<double>{0, 0, 0});
  CHECK(nearest_neighbors(orth, "q", 1) == std::vector<std::string>{"z"});
  // x and y tie at cosine 0; ties go to the smaller token, zero rows never appear.
  CHECK(nearest_neighbors(orth, "q", 3) == std::vector<std::string>{"z", "x", "y"});
}

TEST_CASE("neighbour index agrees with a full sort") {
  Rng rng(4);
  EmbeddingSet e(6);
  for (int i = 0; i < 80; ++i) {
    std::vector<double> v(6);
    for (auto& x : v) x = rng.uniform01() - 0.5;
    e.add("w" + std::to_string(i), v);
  }
  const NeighborIndex index(e);
  for (const auto& t : e.tokens()) CHECK(index.query(t, 10) == oracle::neighbors_by_sort(e, t, 10));
}

TEST_CASE("overlap metric") {
  SUBCASE("identical sets score 100") {
    Rng rng(8);
    EmbeddingSet e(4);
    for (int i = 0; i < 30; ++i) {
      std::vector<double> v(4);
      for (auto& x : v) x = rng.uniform01() - 0.5;
      e.add("w" + std::to_string(i), v);
    }
    const auto s = embedding_overlap(e, e, e.tokens(), 10);
    CHECK(s.mean_percent == 100.0);
    CHECK(s.covered == 30);
    for (const auto& [w, p] : s.per_word) CHECK(p == 100.0);
  }
  SUBCASE("four shared neighbours out of ten") {
    EmbeddingSet a(2), b(2);
    add_angle(a, "t", 0);
    add_angle(b, "t", 0);
    for (int i = 0; i < 4; ++i) {
      add_angle(a, "s" + std::to_string(i), 1 + i);
      add_angle(b, "s" + std::to_string(i), 1 + i);
    }
    for (int i = 0; i < 6; ++i) {
      add_angle(a, "p" + std::to_string(i), 5 + i);
      add_angle(b, "p" + std::to_string(i), 100 + i);
      add_angle(a, "q" + std::to_string(i), 120 + i);
      add_angle(b, "q" + std::to_string(i), 5 + i);
    }
    const std::vector<std::string> targets{"t", "missing"};
    const auto s = embedding_overlap(a, b, targets, 10);
    CHECK(s.per_word.size() == 1);
    CHECK(s.per_word[0].second == 40.0);
    CHECK(s.mean_percent == 40.0);
    CHECK(s.covered == 1);
    CHECK(s.requested == 2);
  }
  SUBCASE("no covered targets") {
    EmbeddingSet a(1);
    a.add("x", std::vector<double>{1});
    const std::vector<std::string> targets{"y"};
    CHECK_THROWS_AS(embedding_overlap(a, a, targets, 1), InsufficientDataError);
  }
}
