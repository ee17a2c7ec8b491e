#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "corpsim/errors.hpp"
#include "corpsim/pipeline.hpp"
#include "synthetic.hpp"

using namespace corpsim;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  ExperimentConfig config;
};

// Three registers sharing a lexicon but differing in topic structure, plus a
// background drawn from all of them.
Workspace make_workspace(const std::string& name, std::size_t tokens_per_register = 60000) {
  Workspace w;
  w.dir = testing::scratch_dir("pipeline_" + name);
  const auto lex = testing::make_lexicon(300);
  static const testing::Source s1(lex, {.cluster_size = 20, .structure_seed = 1});
  static const testing::Source s2(lex, {.cluster_size = 20, .structure_seed = 2});
  static const testing::Source s3(lex, {.cluster_size = 20, .structure_seed = 3});
  const testing::Register ra{{&s1, &s2}, {0.8, 0.2}}, rb{{&s1, &s3}, {0.6, 0.4}}, rc{{&s3}, {1.0}};
  testing::write_corpus(w.dir / "a.txt", ra.generate(tokens_per_register, 1));
  testing::write_corpus(w.dir / "b.txt", rb.generate(tokens_per_register, 2));
  testing::write_corpus(w.dir / "c.txt", rc.generate(tokens_per_register, 3));
  testing::write_corpus(w.dir / "bg.txt", testing::Register{{&s1, &s2, &s3}, {1, 1, 1}}.generate(60000, 4));

  auto& c = w.config;
  c.language = {"tst", FeatureType::W1};
  c.registers = {{"a", w.dir / "a.txt"}, {"b", w.dir / "b.txt"}, {"c", w.dir / "c.txt"}};
  c.background = w.dir / "bg.txt";
  c.size_grid = {20000, 40000};
  c.grid_label = "custom";
  c.chunk_size = 2000;
  c.pairs = 50;
  c.targets = 100;
  c.vocab_k = 300;
  c.train.dim = 12;
  c.train.epochs = 2;
  c.train.negatives = 5;
  c.train.min_count = 2;
  c.train.buckets = 2000;
  c.seed = 3;
  return w;
}

void check_provenance(const Report& r) {
  for (const auto& row : r.rows) {
    for (const auto& [name, cell] : row.values) {
      if (row.table == "correlation" && cell.prov == 0) continue;
      CHECK_MESSAGE(cell.prov >= 1, row.table << "." << name);
      CHECK_MESSAGE(cell.prov <= r.provenance.size(), row.table << "." << name);
    }
  }
  for (std::size_t i = 0; i < r.provenance.size(); ++i) CHECK(r.provenance[i].id == i + 1);
}

std::size_t count_rows(const Report& r, const std::string& table) {
  std::size_t n = 0;
  for (const auto& row : r.rows) n += row.table == table;
  return n;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto langs = LanguageTable::defaults();
  const nlohmann::json j{{"language", "fin"},
                         {"registers", {{"cc", "cc.txt"}, {"tw", "/abs/tw.txt"}}},
                         {"background", "bg.txt"},
                         {"size_grid", {1000, 2000}},
                         {"train", {{"dim", 8}}},
                         {"reliability", {{"mode", "overlapping"}, {"n_pairs", 3}}}};
  const auto c = config_from_json(j, langs, "/base");
  CHECK(c.language.feature_type == FeatureType::C4);
  CHECK(c.registers.size() == 2);
  CHECK(c.registers[0].path == fs::path("/base/cc.txt"));
  CHECK(c.registers[1].path == fs::path("/abs/tw.txt"));
  CHECK(c.size_grid == std::vector<std::size_t>{1000, 2000});
  CHECK(c.grid_label == "custom");
  CHECK(c.train.dim == 8);
  CHECK(c.train.negatives == 50);
  CHECK(c.reliability.mode == SampleMode::Overlapping);
  CHECK(c.reliability.n_pairs == 3);
  CHECK_NOTHROW(c.validate(true));

  auto with = [&](const char* key, nlohmann::json v) {
    auto k = j;
    k[key] = std::move(v);
    return k;
  };
  CHECK(config_from_json(with("size_grid", "full"), langs).size_grid.back() == 100'000'000);
  CHECK(config_from_json(with("size_grid", "desk"), langs).size_grid.size() == 10);
  CHECK(config_from_json(with("feature_type", "C2"), langs).language.feature_type == FeatureType::C2);
  CHECK_THROWS_AS(config_from_json(with("colour", 1), langs), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("language", "zzz"), langs), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("pairs", -1), langs), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("size_grid", "huge"), langs), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("train", {{"epochz", 1}}), langs), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("size_grid", {2000, 1000}), langs).validate(true), ConfigError);
  CHECK_THROWS_AS(config_from_json(with("registers", {{"cc", "x"}}), langs).validate(true), ConfigError);

  const auto echo = to_json(c);
  CHECK(echo["train"]["negatives"] == 50);
  CHECK(echo["pairs"] == 200);
  CHECK_FALSE(echo.contains("output_dir"));
}

TEST_CASE("register experiment") {
  auto w = make_workspace("register");
  const auto r = run_experiment_register(w.config);
  CHECK(r.experiment == "register");
  CHECK(count_rows(r, "pairs") == 3 * 2);
  CHECK(count_rows(r, "correlation") == 2);
  check_provenance(r);
  for (const auto& row : r.rows) {
    if (row.table != "pairs") continue;
    const double emb = *row.values[0].second.value;
    const double corp = *row.values[1].second.value;
    CHECK(emb >= 0.0);
    CHECK(emb <= 100.0);
    CHECK(corp >= -1.0);
    CHECK(corp <= 1.0);
  }

  SUBCASE("prefix consistency") {
    auto smaller = w.config;
    smaller.size_grid = {20000};
    const auto s = run_experiment_register(smaller);
    std::size_t compared = 0;
    for (const auto& row : s.rows) {
      if (row.table != "pairs") continue;
      for (const auto& full : r.rows) {
        if (full.table == "pairs" && full.labels == row.labels) {
          CHECK(full.values[0].second.value == row.values[0].second.value);
          CHECK(full.values[1].second.value == row.values[1].second.value);
          ++compared;
        }
      }
    }
    CHECK(compared == 3);
  }
  SUBCASE("insufficient data names the register") {
    auto big = w.config;
    big.size_grid = {20000, 1000000};
    try {
      run_experiment_register(big);
      FAIL("expected InsufficientDataError");
    } catch (const InsufficientDataError& e) {
      CHECK(std::string(e.what()).find("'a'") != std::string::npos);
      CHECK(std::string(e.what()).find("1000000") != std::string::npos);
    }
  }
}

TEST_CASE("reports and embeddings are reproducible") {
  auto w = make_workspace("determinism");
  w.config.size_grid = {20000};
  w.config.output_dir = w.dir / "run1";
  const auto r1 = run_experiment_register(w.config);
  write_report_files(r1, w.config.output_dir);
  w.config.output_dir = w.dir / "run2";
  const auto r2 = run_experiment_register(w.config);
  write_report_files(r2, w.config.output_dir);
  CHECK(slurp(w.dir / "run1/report.json") == slurp(w.dir / "run2/report.json"));
  CHECK(slurp(w.dir / "run1/report.csv") == slurp(w.dir / "run2/report.csv"));
  CHECK(slurp(w.dir / "run1/embeddings/a_20000.vec") == slurp(w.dir / "run2/embeddings/a_20000.vec"));
  CHECK(fs::exists(w.dir / "run1/embeddings/a_20000.json"));
  CHECK(fs::exists(w.dir / "run1/report.svg"));
  const auto parsed = Report::from_json(nlohmann::json::parse(slurp(w.dir / "run1/report.json")));
  CHECK(parsed.to_json() == r1.to_json());
}

TEST_CASE("size experiment") {
  auto w = make_workspace("size");
  w.config.size_grid = {10000, 20000, 40000};
  w.config.registers.resize(2);
  const auto r = run_experiment_size(w.config);
  CHECK(count_rows(r, "stability") == 2 * 2);
  CHECK(count_rows(r, "register_summary") == 2);
  CHECK(count_rows(r, "correlation") == 2);
  check_provenance(r);
  auto one = w.config;
  one.size_grid = {10000};
  CHECK_THROWS_AS(run_experiment_size(one), ConfigError);
}

TEST_CASE("reliability experiment sampling modes") {
  auto w = make_workspace("reliability");
  w.config.reliability.sample_words = 10000;
  w.config.reliability.n_pairs = 2;
  const auto r = run_experiment_reliability(w.config);
  CHECK(count_rows(r, "sample_pairs") == 3 * 2);
  CHECK(count_rows(r, "registers") == 3);
  CHECK(count_rows(r, "cross_similarity") == 3);
  CHECK(r.warnings.empty());
  check_provenance(r);
  // Disjoint samples start on distinct segment boundaries.
  std::set<double> starts;
  for (const auto& row : r.rows) {
    if (row.table == "sample_pairs" && row.labels[0].second == "a") {
      starts.insert(*row.values[0].second.value);
      starts.insert(*row.values[1].second.value);
    }
  }
  CHECK(starts.size() == 4);
  for (double s : starts) CHECK(static_cast<std::size_t>(s) % 10000 == 0);

  auto tight = w.config;
  tight.reliability.sample_words = 20000;
  const auto fallback = run_experiment_reliability(tight);
  CHECK_FALSE(fallback.warnings.empty());
  tight.reliability.strict = true;
  CHECK_THROWS_AS(run_experiment_reliability(tight), InsufficientDataError);
}

TEST_CASE("similarity stability on identical corpora") {
  const auto dir = testing::scratch_dir("pipeline_simstability");
  const auto lex = testing::make_lexicon(300);
  const testing::Source s(lex, {.structure_seed = 9});
  const auto paragraph = testing::Register{{&s}, {1.0}}.generate(2000, 1);
  std::vector<std::string> repeated;
  for (int i = 0; i < 30; ++i) repeated.insert(repeated.end(), paragraph.begin(), paragraph.end());
  testing::write_corpus(dir / "x.txt", repeated);
  testing::write_corpus(dir / "y.txt", repeated);
  ExperimentConfig c;
  c.language = {"tst", FeatureType::C2};
  c.registers = {{"x", dir / "x.txt"}, {"y", dir / "y.txt"}};
  c.background = dir / "x.txt";
  c.size_grid = {20000, 40000, 60000};
  c.chunk_size = 2000;
  c.vocab_k = 200;
  const auto r = run_experiment_simstability(c);
  CHECK(count_rows(r, "similarity") == 3);
  for (const auto& row : r.rows) {
    if (row.table == "similarity") CHECK(*row.values[0].second.value == doctest::Approx(1.0));
    if (row.table == "ranges") {
      CHECK(row.labels[3].second == "stable");
      CHECK(*row.values[0].second.value == doctest::Approx(0.0));
    }
  }
  check_provenance(r);
  CHECK_THROWS_AS(run_experiment("nonsense", c), ConfigError);
}
