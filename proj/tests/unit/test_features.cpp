#include <doctest.h>

#include <string>
#include <vector>

#include "corpsim/errors.hpp"
#include "corpsim/features.hpp"
#include "synthetic.hpp"

using namespace corpsim;

namespace {

TokenStream stream_of(std::initializer_list<std::pair<const char*, int>> counts) {
  TokenStream s;
  for (const auto& [tok, n] : counts)
    for (int i = 0; i < n; ++i) s.tokens.emplace_back(tok);
  return s;
}

const LangConfig kW1{"fra", FeatureType::W1};

}  // namespace

TEST_CASE("vocabulary ranks by count then bytes") {
  const auto bg = stream_of({{"d", 1}, {"c", 3}, {"a", 5}, {"b", 3}});
  auto v = build_feature_vocabulary(bg, kW1, 3);
  CHECK(v.grams() == std::vector<std::string>{"a", "b", "c"});
  CHECK(v.warnings().empty());
  CHECK(v.index_of("b") == 1);
  CHECK(v.index_of("d") == -1);

  auto all = build_feature_vocabulary(bg, kW1, 10);
  CHECK(all.grams() == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(all.requested_k() == 10);
  CHECK(all.warnings().size() == 1);

  CHECK(build_feature_vocabulary(bg, kW1, 1).grams() == std::vector<std::string>{"a"});
  CHECK_THROWS_AS(build_feature_vocabulary(TokenStream{}, kW1, 3), FeatureError);
  CHECK_THROWS_AS(build_feature_vocabulary(bg, kW1, 0), ConfigError);
}

TEST_CASE("vocabulary id depends on content and type") {
  const auto bg = stream_of({{"x", 2}, {"y", 1}});
  const auto a = build_feature_vocabulary(bg, kW1, 2);
  const auto b = build_feature_vocabulary(bg, kW1, 2, "other label");
  CHECK(a.id() == b.id());
  const auto c = vocabulary_from_counts({{"x", 1}, {"y", 2}}, FeatureType::W1, 2, "t");
  CHECK(c.id() != a.id());
  const auto d = vocabulary_from_counts({{"x", 2}, {"y", 1}}, FeatureType::C2, 2, "t");
  CHECK(d.id() != a.id());
}

TEST_CASE("vocabulary serialization round trip") {
  const auto tokens = testing::make_lexicon(40);
  const auto v = build_feature_vocabulary(TokenStream{tokens}, LangConfig{"deu", FeatureType::C4}, 25);
  const auto text = v.serialize();
  CHECK(text.rfind("#corpsim-vocab\tC4\t25\n", 0) == 0);
  const auto back = FeatureVocabulary::parse(text);
  CHECK(back.grams() == v.grams());
  CHECK(back.feature_type() == FeatureType::C4);
  CHECK(back.id() == v.id());

  const auto dir = testing::scratch_dir("features");
  v.save(dir / "v.tsv");
  CHECK(FeatureVocabulary::load(dir / "v.tsv").id() == v.id());

  CHECK_THROWS_AS(FeatureVocabulary::parse("#corpsim-vocab\tW1\t3\na\nb\n"), FormatError);
  CHECK_THROWS_AS(FeatureVocabulary::parse("nonsense\n"), FormatError);
  try {
    FeatureVocabulary::parse("#corpsim-vocab\tW1\t3\na\n\nb\n");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("vectorize counts vocabulary grams") {
  const FeatureVocabulary vocab({"the", "cat", "dog"}, FeatureType::W1, 3, "t");
  const std::vector<std::string> tokens{"the", "the", "cat"};
  const auto v = vectorize(tokens, vocab);
  CHECK(v.counts == std::vector<std::uint64_t>{2, 1, 0});
  CHECK(v.vocab_id == vocab.id());

  const std::vector<std::string> other{"bird", "fish"};
  CHECK(vectorize(other, vocab).counts == std::vector<std::uint64_t>{0, 0, 0});

  const FeatureVocabulary grams({"e ", " c", "zz"}, FeatureType::C2, 3, "t");
  const std::vector<std::string> the_cat{"the", "cat"};
  CHECK(vectorize(the_cat, grams).counts == std::vector<std::uint64_t>{1, 1, 0});
}

TEST_CASE("vectorize_all preserves chunk order") {
  const FeatureVocabulary vocab({"a", "b"}, FeatureType::W1, 2, "t");
  const auto chunks = chunk_corpus(std::vector<std::string>{"a", "a", "b", "b", "a", "b"}, 2);
  const auto vs = vectorize_all(chunks, vocab);
  REQUIRE(vs.size() == 3);
  CHECK(vs[0].counts == std::vector<std::uint64_t>{2, 0});
  CHECK(vs[1].counts == std::vector<std::uint64_t>{0, 2});
  CHECK(vs[2].counts == std::vector<std::uint64_t>{1, 1});
}
