#include <doctest.h>

#include <fstream>
#include <string>
#include <vector>

#include "corpsim/corpus_io.hpp"
#include "corpsim/errors.hpp"
#include "synthetic.hpp"

using namespace corpsim;

namespace {

const LangConfig kFra{"fra", FeatureType::W1};

std::vector<std::string> numbered(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back("t" + std::to_string(i));
  return v;
}

}  // namespace

TEST_CASE("tokenizer lowercases and splits on punctuation") {
  CHECK(normalize_and_tokenize("The cat SAT.", kFra).tokens == std::vector<std::string>{"the", "cat", "sat"});
  CHECK(normalize_and_tokenize("", kFra).token_count() == 0);
  CHECK(normalize_and_tokenize("  ,;  ", kFra).empty());
  CHECK(normalize_and_tokenize("a1b2, 42!", kFra).tokens == std::vector<std::string>{"a1b2", "42"});
}

TEST_CASE("tokenizer applies NFC and full case folding") {
  // Expected byte strings come from Python's unicodedata.normalize("NFC") and str.casefold().
  const std::string ete = "\xc3\xa9t\xc3\xa9";
  CHECK(normalize_and_tokenize("\xc3\xa9t\xc3\xa9 \xc3\x89t\xc3\xa9", kFra).tokens ==
        std::vector<std::string>{ete, ete});
  // Decomposed input composes to the same token.
  CHECK(normalize_and_tokenize("e\xcc\x81te\xcc\x81", kFra).tokens == std::vector<std::string>{ete});
  CHECK(normalize_and_tokenize("Stra\xc3\x9f" "e", kFra).tokens == std::vector<std::string>{"strasse"});
  CHECK(normalize_and_tokenize("\xef\xac\x81ne", kFra).tokens == std::vector<std::string>{"fine"});
  CHECK(normalize_and_tokenize("\xce\xa3\xce\x8a\xce\xa3\xce\xa5\xce\xa6\xce\x9f\xce\xa3", kFra).tokens ==
        std::vector<std::string>{"\xcf\x83\xce\xaf\xcf\x83\xcf\x85\xcf\x86\xce\xbf\xcf\x83"});
  // Combining marks stay inside the token.
  CHECK(normalize_and_tokenize("\xc4\xb0stanbul", kFra).tokens == std::vector<std::string>{"i\xcc\x87stanbul"});
}

TEST_CASE("tokenizer rejects malformed UTF-8") {
  CHECK_THROWS_AS(normalize_and_tokenize("ab\xc3", kFra), IngestError);
  CHECK_THROWS_AS(normalize_and_tokenize("\xff", kFra), IngestError);
  CHECK_THROWS_AS(normalize_and_tokenize("\xed\xa0\x80", kFra), IngestError);  // surrogate
}

TEST_CASE("tokenize_file streams lines and honours the token cap") {
  const auto dir = testing::scratch_dir("corpus_io");
  const auto path = dir / "c.txt";
  {
    std::ofstream out(path);
    out << "One two\nTHREE, four\n\nfive\n";
  }
  CHECK(tokenize_file(path, kFra).tokens == std::vector<std::string>{"one", "two", "three", "four", "five"});
  CHECK(tokenize_file(path, kFra, 3).tokens == std::vector<std::string>{"one", "two", "three"});
  CHECK_THROWS_AS(tokenize_file(dir / "missing.txt", kFra), IoError);
}

TEST_CASE("chunk_corpus keeps only whole chunks") {
  CHECK(chunk_corpus(numbered(100000), 20000).size() == 5);
  CHECK(chunk_corpus(numbered(119999), 20000).size() == 5);
  CHECK(chunk_corpus(numbered(19999), 20000).empty());
  CHECK_THROWS_AS(chunk_corpus(numbered(10), 0), ConfigError);

  const auto chunks = chunk_corpus(numbered(10), 3, "src");
  REQUIRE(chunks.size() == 3);
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    CHECK(chunks[i].index == i);
    CHECK(chunks[i].source_id == "src");
    CHECK(chunks[i].tokens == std::vector<std::string>{"t" + std::to_string(3 * i), "t" + std::to_string(3 * i + 1),
                                                       "t" + std::to_string(3 * i + 2)});
  }
}

TEST_CASE("gram extraction") {
  const std::vector<std::string> the_cat{"the", "cat"};
  auto w1 = extract_grams(the_cat, FeatureType::W1);
  CHECK(w1.counts.size() == 2);
  CHECK(w1.counts["the"] == 1);
  CHECK(w1.counts["cat"] == 1);

  auto c2 = extract_grams(the_cat, FeatureType::C2);
  const std::unordered_map<std::string, std::uint64_t> expected{{"th", 1}, {"he", 1}, {"e ", 1},
                                                                {" c", 1}, {"ca", 1}, {"at", 1}};
  CHECK(c2.counts == expected);
  CHECK(c2.total() == 6);

  const std::vector<std::string> aaaa{"aaaa"};
  auto c4 = extract_grams(aaaa, FeatureType::C4);
  CHECK(c4.counts.size() == 1);
  CHECK(c4.counts["aaaa"] == 1);

  // Code points, not bytes.
  const std::vector<std::string> accented{"\xc3\xa9t\xc3\xa9"};
  auto acc = extract_grams(accented, FeatureType::C2);
  CHECK(acc.total() == 2);
  CHECK(acc.counts["\xc3\xa9t"] == 1);

  // A chunk shorter than the gram order yields nothing.
  CHECK(extract_grams(std::vector<std::string>{"ab"}, FeatureType::C4).counts.empty());
  CHECK_THROWS_AS(extract_grams(Chunk{}, FeatureType::W1), FeatureError);
}

TEST_CASE("gram totals follow the sliding-window count") {
  const auto tokens = testing::make_lexicon(50);
  std::size_t points = tokens.size() - 1;
  for (const auto& t : tokens) points += t.size();  // lexicon is ASCII
  CHECK(extract_grams(tokens, FeatureType::C4).total() == points - 3);
  CHECK(extract_grams(tokens, FeatureType::C2).total() == points - 1);
  CHECK(extract_grams(tokens, FeatureType::W1).total() == tokens.size());
}

TEST_CASE("language table") {
  const auto table = LanguageTable::defaults();
  CHECK(table.entries().size() == 17);
  CHECK(table.lookup("ara").feature_type == FeatureType::C4);
  CHECK(table.lookup("ell").feature_type == FeatureType::W1);
  CHECK(table.lookup("jpn").feature_type == FeatureType::C2);
  CHECK_THROWS_AS(table.lookup("xxx"), ConfigError);

  const auto parsed = LanguageTable::parse("# comment\n\nabc\tC2\nxyz\tW1\n");
  CHECK(parsed.lookup("abc").feature_type == FeatureType::C2);
  CHECK(parsed.contains("xyz"));
  try {
    LanguageTable::parse("abc\tC2\nbad line\n");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_feature_type("C3"), ConfigError);
}
