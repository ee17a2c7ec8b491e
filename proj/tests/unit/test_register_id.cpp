#include <doctest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "corpsim/errors.hpp"
#include "corpsim/register_id.hpp"
#include "synthetic.hpp"

using namespace corpsim;

namespace {

std::vector<LabeledSimilarity> category_means(std::initializer_list<std::tuple<const char*, const char*, double>> cats) {
  std::vector<LabeledSimilarity> out;
  for (const auto& [a, b, mean] : cats) {
    // Two values per category straddling the mean.
    out.push_back(make_labeled(mean - 0.01, a, b));
    out.push_back(make_labeled(mean + 0.01, a, b));
  }
  return out;
}

}  // namespace

TEST_CASE("pair categories are canonical") {
  CHECK(pair_category("tw", "cc") == "cc-tw");
  CHECK(pair_category("cc", "tw") == "cc-tw");
  const auto l = make_labeled(0.5, "wk", "wk");
  CHECK(l.is_same_register);
  CHECK(l.pair_category == "wk-wk");
}

TEST_CASE("threshold is the midpoint of the closest category means") {
  const auto t = calibrate_threshold(category_means({{"cc", "cc", 0.80}, {"tw", "tw", 0.76}, {"cc", "tw", 0.60}}));
  CHECK(t.min_same == doctest::Approx(0.76));
  CHECK(t.max_cross == doctest::Approx(0.60));
  CHECK(t.value == doctest::Approx(0.68));
  CHECK_FALSE(t.overlap);

  CHECK(calibrate_threshold(category_means({{"a", "a", 0.9}, {"a", "b", 0.7}})).value == doctest::Approx(0.8));

  const auto o = calibrate_threshold(category_means({{"a", "a", 0.6}, {"a", "b", 0.7}}));
  CHECK(o.value == doctest::Approx(0.65));
  CHECK(o.overlap);

  CHECK_THROWS_AS(calibrate_threshold(category_means({{"a", "a", 0.6}})), CalibrationError);
  CHECK_THROWS_AS(calibrate_threshold(category_means({{"a", "b", 0.6}})), CalibrationError);
}

TEST_CASE("classification boundary is inclusive") {
  Threshold t;
  t.value = 0.68;
  CHECK(classify_pair(0.70, t) == RegisterVerdict::Same);
  CHECK(classify_pair(0.68, t) == RegisterVerdict::Same);
  CHECK(classify_pair(0.50, t) == RegisterVerdict::Different);
}

TEST_CASE("folds are stratified and deterministic") {
  const std::map<std::string, std::size_t> counts{{"a", 12}, {"b", 7}};
  const auto f = assign_folds(counts, 5, 3);
  CHECK(f == assign_folds(counts, 5, 3));
  for (const auto& [label, folds] : f) {
    std::vector<std::size_t> per(5, 0);
    for (auto k : folds) ++per[k];
    const auto [lo, hi] = std::minmax_element(per.begin(), per.end());
    CHECK(*hi - *lo <= 1);
    CHECK(folds.size() == counts.at(label));
  }
}

TEST_CASE("cross-validation separates disjoint registers") {
  testing::Source a(testing::make_lexicon(200, 1), {.structure_seed = 1});
  testing::Source b(testing::make_lexicon(200, 2), {.structure_seed = 2});
  const testing::Register ra{{&a}, {1.0}}, rb{{&b}, {1.0}};
  const auto ta = ra.generate(20000, 1), tb = rb.generate(20000, 2);
  std::vector<std::string> bg(ta);
  bg.insert(bg.end(), tb.begin(), tb.end());
  const auto vocab = vocabulary_from_counts(extract_grams(bg, FeatureType::W1).counts, FeatureType::W1, 400, "bg");
  std::map<std::string, std::vector<Chunk>> samples{{"a", chunk_corpus(ta, 1000, "a")},
                                                    {"b", chunk_corpus(tb, 1000, "b")}};
  const auto report = cross_validate(samples, vocab, 5, 11);
  CHECK(report.mean_accuracy == 1.0);
  CHECK(report.fold_accuracies.size() == 5);
  CHECK(accuracy_csv_row("fin", FeatureType::C4, report) == "fin,C4,100%");
  CHECK(accuracy_csv_header() == "language,feature_type,accuracy");

  samples["b"].resize(3);
  CHECK_THROWS_AS(cross_validate(samples, vocab, 5, 11), InsufficientDataError);
  samples.erase("b");
  CHECK_THROWS_AS(cross_validate(samples, vocab, 5, 11), InsufficientDataError);
}
