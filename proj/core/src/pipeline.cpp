#include "corpsim/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "corpsim/embed.hpp"
#include "corpsim/errors.hpp"
#include "corpsim/features.hpp"
#include "corpsim/hash.hpp"
#include "corpsim/rng.hpp"
#include "corpsim/simcore.hpp"
#include "corpsim/stats.hpp"

namespace corpsim {

std::vector<std::size_t> full_grid() {
  std::vector<std::size_t> g;
  for (std::size_t s = 10'000'000; s <= 100'000'000; s += 10'000'000) g.push_back(s);
  return g;
}

std::vector<std::size_t> desk_grid() {
  std::vector<std::size_t> g;
  for (std::size_t s = 200'000; s <= 2'000'000; s += 200'000) g.push_back(s);
  return g;
}

// ---------------------------------------------------------------- config

void ExperimentConfig::validate(bool needs_pairs) const {
  if (registers.empty()) throw ConfigError("at least one register is required");
  if (needs_pairs && registers.size() < 2) throw ConfigError("this experiment needs at least two registers");
  std::set<std::string> seen;
  for (const auto& r : registers) {
    if (r.label.empty()) throw ConfigError("register labels must be non-empty");
    if (r.path.empty()) throw ConfigError("register '" + r.label + "' has no corpus path");
    if (!seen.insert(r.label).second) throw ConfigError("duplicate register label '" + r.label + "'");
  }
  if (background.empty()) throw ConfigError("a background corpus is required");
  if (size_grid.empty()) throw ConfigError("size grid is empty");
  for (std::size_t i = 0; i < size_grid.size(); ++i) {
    if (size_grid[i] == 0) throw ConfigError("grid sizes must be positive");
    if (i && size_grid[i] <= size_grid[i - 1]) throw ConfigError("size grid must be strictly increasing");
  }
  if (chunk_size == 0) throw ConfigError("chunk size must be at least 1");
  if (pairs == 0) throw ConfigError("pair count must be at least 1");
  if (targets == 0) throw ConfigError("target count must be at least 1");
  if (nn == 0) throw ConfigError("neighbour count must be at least 1");
  if (vocab_k == 0) throw ConfigError("vocabulary size must be at least 1");
  if (reliability.sample_words == 0) throw ConfigError("reliability sample size must be positive");
  if (reliability.n_pairs == 0) throw ConfigError("reliability needs at least one pair");
  train.validate();
}

namespace {

std::size_t get_size(const nlohmann::json& j, const char* key) {
  // get<size_t>() would silently wrap negative numbers.
  const bool ok = j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
  if (!ok) throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  return j.get<std::size_t>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j, const LanguageTable& languages,
                                  const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig c;
  std::optional<FeatureType> override_type;
  bool have_language = false;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "language") {
        if (v.is_string()) {
          const auto code = v.get<std::string>();
          c.language = languages.contains(code) ? languages.lookup(code) : LangConfig{code, FeatureType::W1};
          if (!languages.contains(code) && !j.contains("feature_type")) {
            throw ConfigError("language '" + code + "' has no configured feature type; set \"feature_type\"");
          }
        } else {
          c.language.lang_code = v.at("lang_code").get<std::string>();
          c.language.feature_type = parse_feature_type(v.at("feature_type").get<std::string>());
        }
        have_language = true;
      } else if (key == "feature_type") {
        override_type = parse_feature_type(v.get<std::string>());
      } else if (key == "registers") {
        if (v.is_array()) {
          for (const auto& r : v) {
            c.registers.push_back(
                RegisterSpec{r.at("label").get<std::string>(), resolve(base_dir, r.at("path").get<std::string>())});
          }
        } else {
          for (const auto& [label, path] : v.items()) {
            c.registers.push_back(RegisterSpec{label, resolve(base_dir, path.get<std::string>())});
          }
        }
      } else if (key == "background") {
        c.background = resolve(base_dir, v.get<std::string>());
      } else if (key == "size_grid") {
        if (v.is_string()) {
          const auto name = v.get<std::string>();
          if (name == "desk") {
            c.size_grid = desk_grid();
          } else if (name == "full" || name == "paper") {
            c.size_grid = full_grid();
          } else {
            throw ConfigError("size_grid must be \"desk\", \"full\" or a list of sizes");
          }
          c.grid_label = name;
        } else {
          c.size_grid.clear();
          for (const auto& s : v) c.size_grid.push_back(get_size(s, "size_grid"));
          c.grid_label = "custom";
        }
      } else if (key == "chunk_size") {
        c.chunk_size = get_size(v, "chunk_size");
      } else if (key == "pairs") {
        c.pairs = get_size(v, "pairs");
      } else if (key == "min_pairs") {
        c.min_pairs = get_size(v, "min_pairs");
      } else if (key == "targets") {
        c.targets = get_size(v, "targets");
      } else if (key == "nn") {
        c.nn = get_size(v, "nn");
      } else if (key == "vocab_k") {
        c.vocab_k = get_size(v, "vocab_k");
      } else if (key == "seed") {
        c.seed = get_size(v, "seed");
      } else if (key == "train") {
        c.train = train_params_from_json(v);
      } else if (key == "output_dir") {
        c.output_dir = resolve(base_dir, v.get<std::string>());
      } else if (key == "reliability") {
        for (const auto& [rk, rv] : v.items()) {
          if (rk == "sample_words") {
            c.reliability.sample_words = get_size(rv, "sample_words");
          } else if (rk == "n_pairs") {
            c.reliability.n_pairs = get_size(rv, "n_pairs");
          } else if (rk == "mode") {
            const auto m = rv.get<std::string>();
            if (m == "disjoint") {
              c.reliability.mode = SampleMode::Disjoint;
            } else if (m == "overlapping") {
              c.reliability.mode = SampleMode::Overlapping;
            } else {
              throw ConfigError("reliability.mode must be \"disjoint\" or \"overlapping\"");
            }
          } else if (rk == "strict") {
            c.reliability.strict = rv.get<bool>();
          } else {
            throw ConfigError("unknown reliability setting '" + rk + "'");
          }
        }
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid experiment config: ") + e.what());
  }
  if (!have_language) throw ConfigError("config needs a \"language\"");
  if (override_type) c.language.feature_type = *override_type;
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path, const LanguageTable& languages) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, languages, path.parent_path());
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json regs = nlohmann::json::array();
  for (const auto& r : c.registers) regs.push_back({{"label", r.label}, {"path", r.path.generic_string()}});
  return nlohmann::json{
      {"language", {{"lang_code", c.language.lang_code}, {"feature_type", to_string(c.language.feature_type)}}},
      {"registers", regs},
      {"background", c.background.generic_string()},
      {"size_grid", c.size_grid},
      {"grid_label", c.grid_label},
      {"chunk_size", c.chunk_size},
      {"pairs", c.pairs},
      {"min_pairs", c.min_pairs},
      {"targets", c.targets},
      {"nn", c.nn},
      {"vocab_k", c.vocab_k},
      {"train", to_json(c.train)},
      {"seed", c.seed},
      {"reliability",
       {{"sample_words", c.reliability.sample_words},
        {"n_pairs", c.reliability.n_pairs},
        {"mode", c.reliability.mode == SampleMode::Disjoint ? "disjoint" : "overlapping"},
        {"strict", c.reliability.strict}}}};
}

// ---------------------------------------------------------------- shared machinery

namespace {

struct Register {
  std::string label;
  TokenStream stream;
  std::vector<FrequencyVector> chunk_vectors;  ///< vectors of consecutive chunks from the start

  std::span<const std::string> prefix(std::size_t words) const {
    return std::span<const std::string>(stream.tokens).first(words);
  }
};

class Runner {
 public:
  Runner(const ExperimentConfig& config, std::string experiment, const ProgressFn& progress)
      : config_(config), progress_(progress) {
    report_.experiment = std::move(experiment);
    report_.seed = config.seed;
    report_.grid = config.grid_label;
    report_.config = to_json(config);
  }

  Report& report() { return report_; }
  const ExperimentConfig& config() const { return config_; }

  void say(const std::string& msg) const {
    if (progress_) progress_(msg);
  }

  void warn(std::string msg) {
    say("warning: " + msg);
    report_.warnings.push_back(std::move(msg));
  }

  void load_background(bool need_vocab, bool need_targets) {
    say("tokenizing background " + config_.background.generic_string());
    const auto bg = tokenize_file(config_.background, config_.language);
    background_hash_ = hash_tokens(bg.tokens);
    if (need_vocab) {
      vocab_.emplace(build_feature_vocabulary(bg, config_.language, config_.vocab_k, "background"));
      for (const auto& w : vocab_->warnings()) warn("feature vocabulary: " + w);
      vocab_prov_ = report_.log("build_feature_vocabulary",
                                {{"background_hash", hex64(background_hash_)},
                                 {"feature_type", to_string(config_.language.feature_type)},
                                 {"k", config_.vocab_k},
                                 {"vocab_id", hex64(vocab_->id())}});
    }
    if (need_targets) {
      auto t = select_target_words(bg, config_.targets);
      for (const auto& w : t.warnings) warn("target words: " + w);
      targets_ = std::move(t.words);
      targets_prov_ = report_.log("select_target_words",
                                  {{"background_hash", hex64(background_hash_)}, {"k", config_.targets}});
    }
  }

  /// Loads registers, keeping at most `max_tokens` tokens (all when nullopt).
  void load_registers(std::optional<std::size_t> max_tokens, std::size_t required) {
    for (const auto& spec : config_.registers) {
      say("tokenizing register " + spec.label + " from " + spec.path.generic_string());
      Register r{spec.label, tokenize_file(spec.path, config_.language, max_tokens), {}};
      if (r.stream.token_count() < required) {
        throw InsufficientDataError("register '" + spec.label + "' has " + std::to_string(r.stream.token_count()) +
                                    " tokens; size " + std::to_string(required) + " is required");
      }
      registers_.push_back(std::move(r));
    }
  }

  void vectorize_registers(std::size_t words) {
    for (auto& r : registers_) {
      const auto chunks = chunk_corpus(r.prefix(std::min(words, r.stream.token_count())), config_.chunk_size, r.label);
      r.chunk_vectors = vectorize_all(chunks, *vocab_);
    }
  }

  std::vector<Register>& registers() { return registers_; }
  const std::vector<std::string>& targets() const { return targets_; }

  std::span<const FrequencyVector> chunk_prefix(const Register& r, std::size_t words) const {
    return std::span<const FrequencyVector>(r.chunk_vectors).first(std::min(words / config_.chunk_size, r.chunk_vectors.size()));
  }

  struct Estimate {
    SimilarityEstimate est;
    std::size_t prov;
  };

  Estimate similarity(const Register& a, const Register& b, std::size_t words) {
    SimilarityOptions opt{config_.pairs, subseed(config_.seed, "similarity/" + a.label + "-" + b.label + "/" +
                                                                    std::to_string(words)),
                          config_.min_pairs};
    SimilarityEstimate est;
    try {
      est = corpus_similarity(chunk_prefix(a, words), chunk_prefix(b, words), opt);
    } catch (const InsufficientDataError& e) {
      throw InsufficientDataError("similarity " + a.label + "-" + b.label + " at " + std::to_string(words) +
                                  " words: " + e.what());
    }
    est.corpus_a = a.label;
    est.corpus_b = b.label;
    if (est.skipped_pairs) {
      warn("similarity " + a.label + "-" + b.label + " at " + std::to_string(words) + ": skipped " +
           std::to_string(est.skipped_pairs) + " degenerate pairs");
    }
    const auto prov = report_.log(
        "corpus_similarity", {{"corpus_a", a.label},
                              {"corpus_b", b.label},
                              {"hash_a", hex64(hash_tokens(a.prefix(words)))},
                              {"hash_b", hex64(hash_tokens(b.prefix(words)))},
                              {"words", words},
                              {"vocab_prov", vocab_prov_},
                              {"pairs", config_.pairs},
                              {"seed", opt.seed},
                              {"n_pairs", est.n_pairs},
                              {"skipped_pairs", est.skipped_pairs}});
    return {est, prov};
  }

  Estimate homogeneity(const Register& r, std::size_t words) {
    SimilarityOptions opt{config_.pairs,
                          subseed(config_.seed, "homogeneity/" + r.label + "/" + std::to_string(words)),
                          config_.min_pairs};
    SimilarityEstimate est;
    try {
      est = corpus_homogeneity(chunk_prefix(r, words), opt);
    } catch (const InsufficientDataError& e) {
      throw InsufficientDataError("homogeneity of " + r.label + " at " + std::to_string(words) + " words: " +
                                  e.what());
    }
    est.corpus_a = est.corpus_b = r.label;
    const auto prov = report_.log("corpus_homogeneity", {{"corpus", r.label},
                                                         {"hash", hex64(hash_tokens(r.prefix(words)))},
                                                         {"words", words},
                                                         {"vocab_prov", vocab_prov_},
                                                         {"pairs", config_.pairs},
                                                         {"seed", opt.seed},
                                                         {"n_pairs", est.n_pairs}});
    return {est, prov};
  }

  struct Trained {
    EmbeddingSet embs;
    std::size_t prov;
  };

  /// Trains on `tokens`; `tag` names the condition and derives the seed.
  Trained train(std::span<const std::string> tokens, const std::string& tag) {
    TrainParams params = config_.train;
    params.seed = subseed(config_.seed, "train/" + tag);
    say("training " + tag + " on " + std::to_string(tokens.size()) + " tokens");
    TrainStats stats;
    EmbeddingSet embs = train_embeddings(tokens, params, &stats);
    embs.set_source_label(tag);
    nlohmann::json inputs{{"tag", tag},
                          {"corpus_hash", hex64(stats.corpus_hash)},
                          {"tokens", stats.corpus_tokens},
                          {"seed", params.seed},
                          {"vocab_size", stats.vocab_size}};
    if (!config_.output_dir.empty()) {
      const auto dir = config_.output_dir / "embeddings";
      std::filesystem::create_directories(dir);
      std::string file = tag;
      std::replace(file.begin(), file.end(), '/', '_');
      save_embeddings(embs, dir / (file + ".vec"));
      save_training_sidecar(dir / (file + ".json"), params, stats);
      inputs["file"] = "embeddings/" + file + ".vec";
    }
    const auto prov = report_.log("train_embeddings", std::move(inputs));
    return {std::move(embs), prov};
  }

  struct Overlap {
    OverlapScore score;
    std::size_t prov;
  };

  Overlap overlap(const Trained& a, const Trained& b) {
    auto score = embedding_overlap(a.embs, b.embs, targets_, config_.nn);
    if (score.covered < score.requested) {
      warn("overlap " + a.embs.source_label() + " vs " + b.embs.source_label() + ": " +
           std::to_string(score.covered) + " of " + std::to_string(score.requested) + " targets covered");
    }
    const auto prov = report_.log("embedding_overlap", {{"a_prov", a.prov},
                                                        {"b_prov", b.prov},
                                                        {"targets_prov", targets_prov_},
                                                        {"nn", config_.nn},
                                                        {"covered", score.covered},
                                                        {"requested", score.requested}});
    return {std::move(score), prov};
  }

  /// Pearson correlation, or an empty cell with a warning when undefined.
  Cell correlation(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& what,
                   nlohmann::json inputs) {
    const auto prov = report_.log("pearson_r", std::move(inputs));
    try {
      return Cell{pearson_r(xs, ys), prov};
    } catch (const Error& e) {
      warn(what + ": " + e.what());
      return Cell{std::nullopt, prov};
    }
  }

  Report finish() { return std::move(report_); }

 private:
  const ExperimentConfig& config_;
  const ProgressFn& progress_;
  Report report_;
  std::optional<FeatureVocabulary> vocab_;
  std::vector<std::string> targets_;
  std::uint64_t background_hash_ = 0;
  std::size_t vocab_prov_ = 0;
  std::size_t targets_prov_ = 0;
  std::vector<Register> registers_;
};

std::vector<std::pair<std::size_t, std::size_t>> register_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
  }
  return out;
}

std::string size_tag(const std::string& label, std::size_t words) { return label + "/" + std::to_string(words); }

double millions(std::size_t words) { return static_cast<double>(words) / 1e6; }

}  // namespace

// ---------------------------------------------------------------- experiments

Report run_experiment_register(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate(true);
  Runner run(config, "register", progress);
  const std::size_t max_size = config.size_grid.back();
  run.load_background(true, true);
  run.load_registers(max_size, max_size);
  run.vectorize_registers(max_size);
  auto& regs = run.registers();
  const auto pairs = register_pairs(regs.size());
  auto& report = run.report();

  std::vector<ChartSeries> emb_series(pairs.size()), corp_series(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    emb_series[p].name = corp_series[p].name = regs[pairs[p].first].label + "-" + regs[pairs[p].second].label;
  }

  for (std::size_t size : config.size_grid) {
    std::vector<Runner::Trained> models;
    for (const auto& r : regs) models.push_back(run.train(r.prefix(size), size_tag(r.label, size)));
    std::vector<double> corp, emb;
    std::vector<std::size_t> provs;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& a = regs[pairs[p].first];
      const auto& b = regs[pairs[p].second];
      const auto sim = run.similarity(a, b, size);
      const auto ov = run.overlap(models[pairs[p].first], models[pairs[p].second]);
      report.rows.push_back(ReportRow{
          "pairs",
          {{"size", std::to_string(size)}, {"pair", emb_series[p].name}},
          {{"embedding_similarity", {ov.score.mean_percent, ov.prov}},
           {"corpus_similarity", {sim.est.mean_rho, sim.prov}},
           {"corpus_similarity_sd", {sim.est.sd_rho, sim.prov}},
           {"n_pairs", {static_cast<double>(sim.est.n_pairs), sim.prov}},
           {"covered_targets", {static_cast<double>(ov.score.covered), ov.prov}}}});
      corp.push_back(sim.est.mean_rho);
      emb.push_back(ov.score.mean_percent);
      provs.push_back(sim.prov);
      provs.push_back(ov.prov);
      emb_series[p].points.emplace_back(millions(size), ov.score.mean_percent);
      corp_series[p].points.emplace_back(millions(size), sim.est.mean_rho);
    }
    const Cell r = run.correlation(corp, emb, "correlation at " + std::to_string(size) + " words",
                                   {{"x", "corpus_similarity"}, {"y", "embedding_similarity"}, {"cells", provs}});
    report.rows.push_back(ReportRow{"correlation", {{"size", std::to_string(size)}}, {{"pearson_r", r}}});
  }
  report.charts.push_back(Chart{"Embedding similarity across registers by training size",
                                "training size (million words)", "nearest-neighbour overlap (%)", emb_series});
  report.charts.push_back(Chart{"Corpus similarity between registers by size", "corpus size (million words)",
                                "mean Spearman rho", corp_series});
  return run.finish();
}

Report run_experiment_size(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate(false);
  if (config.size_grid.size() < 2) throw ConfigError("the size experiment needs at least two grid sizes");
  Runner run(config, "size", progress);
  const std::size_t max_size = config.size_grid.back();
  run.load_background(true, true);
  run.load_registers(max_size, max_size);
  run.vectorize_registers(max_size);
  auto& regs = run.registers();
  auto& report = run.report();

  std::vector<ChartSeries> series;
  std::vector<double> homogeneity, deltas, slopes;
  std::vector<std::size_t> summary_provs;
  for (const auto& r : regs) {
    ChartSeries s{r.label, {}};
    std::optional<Runner::Trained> previous;
    std::vector<double> xs, ys;
    std::vector<std::size_t> provs;
    for (std::size_t i = 0; i < config.size_grid.size(); ++i) {
      const std::size_t size = config.size_grid[i];
      auto model = run.train(r.prefix(size), size_tag(r.label, size));
      if (previous) {
        const auto ov = run.overlap(*previous, model);
        const std::size_t lower = config.size_grid[i - 1];
        report.rows.push_back(ReportRow{
            "stability",
            {{"register", r.label}, {"comparison", std::to_string(lower) + "-" + std::to_string(size)}},
            {{"lower_size", {static_cast<double>(lower), ov.prov}},
             {"upper_size", {static_cast<double>(size), ov.prov}},
             {"stability", {ov.score.mean_percent, ov.prov}}}});
        xs.push_back(millions(size));
        ys.push_back(ov.score.mean_percent);
        provs.push_back(ov.prov);
        s.points.emplace_back(millions(size), ov.score.mean_percent);
      }
      previous.emplace(std::move(model));
    }
    const double delta = stability_delta(ys.front(), ys.back());
    const auto delta_prov = report.log("stability_delta", {{"first", provs.front()}, {"last", provs.back()}});
    const auto slope_prov = report.log("ols_slope", {{"x", "upper size (million words)"}, {"cells", provs}});
    Cell slope{std::nullopt, slope_prov};
    try {
      slope.value = ols_slope(xs, ys);
    } catch (const Error& e) {
      run.warn("stability slope for " + r.label + ": " + e.what());
    }
    const auto hom = run.homogeneity(r, max_size);
    report.rows.push_back(ReportRow{"register_summary",
                                    {{"register", r.label}},
                                    {{"stability_delta", {delta, delta_prov}},
                                     {"stability_slope", slope},
                                     {"homogeneity", {hom.est.mean_rho, hom.prov}},
                                     {"homogeneity_sd", {hom.est.sd_rho, hom.prov}}}});
    homogeneity.push_back(hom.est.mean_rho);
    deltas.push_back(delta);
    slopes.push_back(slope.value.value_or(0.0));
    summary_provs.insert(summary_provs.end(), {delta_prov, slope_prov, hom.prov});
    series.push_back(std::move(s));
  }
  const Cell r_delta = run.correlation(homogeneity, deltas, "homogeneity vs stability delta",
                                       {{"x", "homogeneity"}, {"y", "stability_delta"}, {"cells", summary_provs}});
  const Cell r_slope = run.correlation(homogeneity, slopes, "homogeneity vs stability slope",
                                       {{"x", "homogeneity"}, {"y", "stability_slope"}, {"cells", summary_provs}});
  report.rows.push_back(ReportRow{"correlation", {{"measure", "homogeneity~stability_delta"}}, {{"pearson_r", r_delta}}});
  report.rows.push_back(ReportRow{"correlation", {{"measure", "homogeneity~stability_slope"}}, {{"pearson_r", r_slope}}});
  report.charts.push_back(Chart{"Embedding stability within registers by training size",
                                "larger training size (million words)", "overlap with previous size (%)", series});
  return run.finish();
}

Report run_experiment_reliability(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate(false);
  Runner run(config, "reliability", progress);
  const auto& rc = config.reliability;
  const std::size_t samples_needed = 2 * rc.n_pairs;
  run.load_background(true, true);
  run.load_registers(std::nullopt, rc.sample_words);
  auto& regs = run.registers();
  auto& report = run.report();
  std::size_t shortest = SIZE_MAX;
  for (const auto& r : regs) shortest = std::min(shortest, r.stream.token_count());
  run.vectorize_registers(shortest);

  std::vector<double> reliability;
  std::vector<std::size_t> reliability_provs;
  ChartSeries series{"reliability", {}};
  for (std::size_t ri = 0; ri < regs.size(); ++ri) {
    const auto& r = regs[ri];
    const std::size_t n_tokens = r.stream.token_count();
    std::vector<std::size_t> starts;
    bool overlapping = rc.mode == SampleMode::Overlapping;
    if (!overlapping) {
      const std::size_t segments = n_tokens / rc.sample_words;
      if (segments >= samples_needed) {
        std::vector<std::size_t> order(segments);
        for (std::size_t i = 0; i < segments; ++i) order[i] = i;
        Rng rng(subseed(config.seed, "reliability/segments/" + r.label));
        for (std::size_t i = segments; i > 1; --i) std::swap(order[i - 1], order[rng.uniform(i)]);
        for (std::size_t i = 0; i < samples_needed; ++i) starts.push_back(order[i] * rc.sample_words);
      } else if (rc.strict) {
        throw InsufficientDataError("register '" + r.label + "' holds " + std::to_string(segments) +
                                    " disjoint samples of " + std::to_string(rc.sample_words) + " words; " +
                                    std::to_string(samples_needed) + " are required");
      } else {
        run.warn("REGISTER '" + r.label + "' IS TOO SMALL FOR " + std::to_string(samples_needed) +
                 " DISJOINT SAMPLES; FALLING BACK TO OVERLAPPING SAMPLES");
        overlapping = true;
      }
    }
    if (overlapping) {
      Rng rng(subseed(config.seed, "reliability/starts/" + r.label));
      for (std::size_t i = 0; i < samples_needed; ++i) starts.push_back(rng.uniform(n_tokens - rc.sample_words + 1));
    }

    std::vector<double> overlaps;
    std::vector<std::size_t> provs;
    for (std::size_t p = 0; p < rc.n_pairs; ++p) {
      const auto sample_a = std::span<const std::string>(r.stream.tokens).subspan(starts[2 * p], rc.sample_words);
      const auto sample_b = std::span<const std::string>(r.stream.tokens).subspan(starts[2 * p + 1], rc.sample_words);
      const auto ma = run.train(sample_a, "reliability/" + r.label + "/sample" + std::to_string(2 * p));
      const auto mb = run.train(sample_b, "reliability/" + r.label + "/sample" + std::to_string(2 * p + 1));
      const auto ov = run.overlap(ma, mb);
      report.rows.push_back(ReportRow{"sample_pairs",
                                      {{"register", r.label}, {"pair", std::to_string(p)}},
                                      {{"start_a", {static_cast<double>(starts[2 * p]), ma.prov}},
                                       {"start_b", {static_cast<double>(starts[2 * p + 1]), mb.prov}},
                                       {"overlap", {ov.score.mean_percent, ov.prov}}}});
      overlaps.push_back(ov.score.mean_percent);
      provs.push_back(ov.prov);
    }
    double sum = 0.0;
    for (double o : overlaps) sum += o;
    reliability.push_back(sum / static_cast<double>(overlaps.size()));
    reliability_provs.push_back(report.log("mean", {{"of", "embedding_overlap"}, {"cells", provs}}));
    series.points.emplace_back(static_cast<double>(ri + 1), reliability.back());
  }

  // Standardise homogeneity over every register combination (within and across).
  std::vector<double> combo_values;
  std::vector<std::size_t> combo_provs;
  std::vector<Runner::Estimate> homs;
  for (const auto& r : regs) {
    homs.push_back(run.homogeneity(r, shortest));
    combo_values.push_back(homs.back().est.mean_rho);
    combo_provs.push_back(homs.back().prov);
  }
  for (const auto& [i, j] : register_pairs(regs.size())) {
    const auto sim = run.similarity(regs[i], regs[j], shortest);
    combo_values.push_back(sim.est.mean_rho);
    combo_provs.push_back(sim.prov);
    report.rows.push_back(ReportRow{"cross_similarity",
                                    {{"pair", regs[i].label + "-" + regs[j].label}},
                                    {{"corpus_similarity", {sim.est.mean_rho, sim.prov}}}});
  }
  const auto z_prov = report.log("zscore_standardize", {{"cells", combo_provs}});
  std::vector<std::optional<double>> z(regs.size());
  try {
    const auto zs = zscore_standardize(combo_values);
    for (std::size_t i = 0; i < regs.size(); ++i) z[i] = zs[i];
  } catch (const Error& e) {
    run.warn(std::string("homogeneity z-scores: ") + e.what());
  }
  std::vector<double> zx, ry;
  for (std::size_t i = 0; i < regs.size(); ++i) {
    report.rows.push_back(ReportRow{"registers",
                                    {{"register", regs[i].label}},
                                    {{"reliability", {reliability[i], reliability_provs[i]}},
                                     {"homogeneity", {homs[i].est.mean_rho, homs[i].prov}},
                                     {"homogeneity_z", {z[i], z_prov}}}});
    if (z[i]) {
      zx.push_back(*z[i]);
      ry.push_back(reliability[i]);
    }
  }
  std::vector<std::size_t> cells = reliability_provs;
  cells.push_back(z_prov);
  const Cell corr = run.correlation(ry, zx, "reliability vs homogeneity",
                                    {{"x", "reliability"}, {"y", "homogeneity_z"}, {"cells", cells}});
  report.rows.push_back(ReportRow{"correlation", {{"language", config.language.lang_code}}, {{"pearson_r", corr}}});
  report.charts.push_back(Chart{"Embedding reliability by register (1 = " + regs.front().label + ")",
                                "register index", "mean overlap across sample pairs (%)", {series}});
  return run.finish();
}

Report run_experiment_simstability(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate(true);
  Runner run(config, "simstability", progress);
  const std::size_t max_size = config.size_grid.back();
  run.load_background(true, false);
  run.load_registers(max_size, max_size);
  run.vectorize_registers(max_size);
  auto& regs = run.registers();
  auto& report = run.report();

  std::vector<ChartSeries> series;
  for (const auto& [i, j] : register_pairs(regs.size())) {
    const std::string name = regs[i].label + "-" + regs[j].label;
    ChartSeries s{name, {}};
    std::vector<double> values;
    std::vector<std::size_t> provs;
    for (std::size_t size : config.size_grid) {
      const auto sim = run.similarity(regs[i], regs[j], size);
      report.rows.push_back(ReportRow{"similarity",
                                      {{"pair", name}, {"size", std::to_string(size)}},
                                      {{"corpus_similarity", {sim.est.mean_rho, sim.prov}},
                                       {"corpus_similarity_sd", {sim.est.sd_rho, sim.prov}},
                                       {"n_pairs", {static_cast<double>(sim.est.n_pairs), sim.prov}}}});
      values.push_back(sim.est.mean_rho);
      provs.push_back(sim.prov);
      s.points.emplace_back(millions(size), sim.est.mean_rho);
    }
    const double range = max_min_range(values);
    const auto range_prov = report.log("max_min_range", {{"cells", provs}});
    const double mu0 = mean(values);
    const auto t_prov = report.log("one_sample_t_test", {{"cells", provs}, {"mu0", "grand mean"}});
    Cell t{std::nullopt, t_prov}, df{std::nullopt, t_prov}, p{std::nullopt, t_prov};
    std::string verdict;
    try {
      const auto tt = one_sample_t_test(values, mu0);
      t.value = tt.t;
      df.value = static_cast<double>(tt.df);
      p.value = tt.p_two_sided;
      verdict = tt.p_two_sided > 0.05 ? "stable" : "unstable";
    } catch (const DegenerateVectorError&) {
      verdict = "stable";
      run.warn("t-test for " + name + " undefined (constant or single value); range is " + std::to_string(range));
    }
    report.rows.push_back(ReportRow{"ranges",
                                    {{"language", config.language.lang_code},
                                     {"feature_type", std::string(to_string(config.language.feature_type))},
                                     {"pair", name},
                                     {"verdict", verdict}},
                                    {{"max_min_range", {range, range_prov}},
                                     {"mu0", {mu0, t_prov}},
                                     {"t", t},
                                     {"df", df},
                                     {"p_two_sided", p}}});
    series.push_back(std::move(s));
  }
  report.charts.push_back(Chart{"Corpus similarity between registers by size", "corpus size (million words)",
                                "mean Spearman rho", series});
  return run.finish();
}

Report run_experiment(std::string_view name, const ExperimentConfig& config, const ProgressFn& progress) {
  if (name == "register") return run_experiment_register(config, progress);
  if (name == "size") return run_experiment_size(config, progress);
  if (name == "reliability") return run_experiment_reliability(config, progress);
  if (name == "simstability") return run_experiment_simstability(config, progress);
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

void write_report_files(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    out << text;
  };
  write("report.json", report.to_json().dump(2) + "\n");
  write("report.csv", report.to_csv());
  write("report.svg", report.to_svg());
}

}  // namespace corpsim
