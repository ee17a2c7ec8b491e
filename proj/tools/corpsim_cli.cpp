// corpsim: corpus similarity, embedding overlap and the register/size/
// reliability/similarity-stability experiments from the command line.
//
// Exit codes: 0 success, 1 other failure, 2 configuration error,
// 3 insufficient data, 4 format error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "corpsim/corpus_io.hpp"
#include "corpsim/embed.hpp"
#include "corpsim/errors.hpp"
#include "corpsim/features.hpp"
#include "corpsim/pipeline.hpp"
#include "corpsim/register_id.hpp"
#include "corpsim/report.hpp"
#include "corpsim/sgns.hpp"
#include "corpsim/simcore.hpp"

namespace fs = std::filesystem;
using namespace corpsim;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kInsufficient = 3, kFormat = 4 };

struct LangOptions {
  std::string lang;
  std::string feature;
  std::string lang_table;
  std::string background;
  std::string vocab;
  std::size_t k = kDefaultVocabSize;
  std::size_t chunk_size = kDefaultChunkSize;

  void add_to(CLI::App* cmd, bool with_vocab) {
    cmd->add_option("--lang", lang, "ISO 639-3 language code");
    cmd->add_option("--feature", feature, "Feature type override (W1, C2, C4)");
    cmd->add_option("--lang-table", lang_table, "lang_code<TAB>feature_type file (default: bundled table)");
    cmd->add_option("--chunk-size", chunk_size, "Tokens per chunk")->capture_default_str();
    if (with_vocab) {
      cmd->add_option("--background", background, "Background corpus used to select features");
      cmd->add_option("--vocab", vocab, "Prebuilt feature vocabulary file");
      cmd->add_option("--k", k, "Feature vocabulary size")->capture_default_str();
    }
  }

  LanguageTable table() const {
    return lang_table.empty() ? LanguageTable::defaults() : LanguageTable::load(lang_table);
  }

  LangConfig config() const {
    LangConfig c;
    if (!lang.empty()) {
      const auto t = table();
      if (t.contains(lang)) {
        c = t.lookup(lang);
      } else if (feature.empty()) {
        throw ConfigError("language '" + lang + "' has no configured feature type; pass --feature");
      } else {
        c.lang_code = lang;
      }
    } else if (feature.empty()) {
      throw ConfigError("pass --lang or --feature");
    }
    if (!feature.empty()) c.feature_type = parse_feature_type(feature);
    return c;
  }

  FeatureVocabulary vocabulary(const LangConfig& c) const {
    if (!vocab.empty()) {
      auto v = FeatureVocabulary::load(vocab);
      if (v.feature_type() != c.feature_type) {
        throw ConfigError("vocabulary feature type " + std::string(to_string(v.feature_type())) +
                          " does not match configured " + std::string(to_string(c.feature_type)));
      }
      return v;
    }
    if (background.empty()) throw ConfigError("pass --background or --vocab");
    return build_feature_vocabulary(tokenize_file(background, c), c, k, fs::path(background).filename().string());
  }
};

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw IoError("cannot write " + out);
  f << text;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"corpsim: corpus similarity and embedding stability toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  // similarity
  LangOptions sim_lang;
  std::string sim_a, sim_b;
  SimilarityOptions sim_opt;
  auto* sim = app.add_subcommand("similarity", "Mean Spearman rho between chunk pairs of two corpora");
  sim->add_option("A", sim_a, "First corpus")->required();
  sim->add_option("B", sim_b, "Second corpus")->required();
  sim_lang.add_to(sim, true);
  sim->add_option("--pairs", sim_opt.pairs, "Chunk pairs to sample")->capture_default_str();
  sim->add_option("--seed", sim_opt.seed, "Sampling seed")->capture_default_str();
  sim->add_option("--min-pairs", sim_opt.min_pairs, "Minimum pairs for a valid estimate")->capture_default_str();

  // homogeneity
  LangOptions hom_lang;
  std::string hom_a;
  SimilarityOptions hom_opt;
  auto* hom = app.add_subcommand("homogeneity", "Mean Spearman rho between chunk pairs within one corpus");
  hom->add_option("A", hom_a, "Corpus")->required();
  hom_lang.add_to(hom, true);
  hom->add_option("--pairs", hom_opt.pairs, "Chunk pairs to sample")->capture_default_str();
  hom->add_option("--seed", hom_opt.seed, "Sampling seed")->capture_default_str();
  hom->add_option("--min-pairs", hom_opt.min_pairs, "Minimum pairs for a valid estimate")->capture_default_str();

  // vocab
  LangOptions voc_lang;
  std::string voc_out;
  auto* voc = app.add_subcommand("vocab", "Build a feature vocabulary file from a background corpus");
  voc->add_option("BACKGROUND", voc_lang.background, "Background corpus")->required();
  voc_lang.add_to(voc, false);
  voc->add_option("--k", voc_lang.k, "Vocabulary size")->capture_default_str();
  voc->add_option("--out", voc_out, "Output file (default: stdout)");

  // register-id
  LangOptions rid_lang;
  std::string rid_dir, rid_format = "json";
  std::size_t rid_folds = 5;
  std::uint64_t rid_seed = 0;
  auto* rid = app.add_subcommand("register-id", "Five-fold threshold evaluation of register identification");
  rid->add_option("--samples", rid_dir, "Directory with one corpus file per register (label = file stem)")
      ->required();
  rid_lang.add_to(rid, true);
  rid->add_option("--folds", rid_folds, "Cross-validation folds")->capture_default_str();
  rid->add_option("--seed", rid_seed, "Fold assignment seed")->capture_default_str();
  rid->add_option("--format", rid_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  // embed-overlap
  std::string ov_a, ov_b, ov_bg, ov_lang = "und";
  std::size_t ov_targets = kDefaultTargetCount, ov_nn = kDefaultNeighborCount;
  bool ov_per_word = false;
  auto* ov = app.add_subcommand("embed-overlap", "Nearest-neighbour overlap between two embedding files");
  ov->add_option("VEC1", ov_a, "First embedding file")->required();
  ov->add_option("VEC2", ov_b, "Second embedding file")->required();
  ov->add_option("--background", ov_bg, "Background corpus for target words")->required();
  ov->add_option("--targets", ov_targets, "Number of target words")->capture_default_str();
  ov->add_option("--nn", ov_nn, "Neighbours per target")->capture_default_str();
  ov->add_option("--lang", ov_lang, "Language code of the background corpus");
  ov->add_flag("--per-word", ov_per_word, "Include per-word overlap");

  // train
  std::string tr_corpus, tr_out, tr_lang = "und";
  TrainParams tp;
  auto* tr = app.add_subcommand("train", "Train skip-gram negative-sampling embeddings with subwords");
  tr->add_option("CORPUS", tr_corpus, "Training corpus")->required();
  tr->add_option("--out", tr_out, "Output embedding file")->required();
  tr->add_option("--lang", tr_lang, "Language code");
  tr->add_option("--dim", tp.dim)->capture_default_str();
  tr->add_option("--window", tp.window)->capture_default_str();
  tr->add_option("--negatives", tp.negatives)->capture_default_str();
  tr->add_option("--epochs", tp.epochs)->capture_default_str();
  tr->add_option("--lr", tp.initial_lr)->capture_default_str();
  tr->add_option("--min-count", tp.min_count)->capture_default_str();
  tr->add_option("--minn", tp.minn)->capture_default_str();
  tr->add_option("--maxn", tp.maxn)->capture_default_str();
  tr->add_option("--buckets", tp.buckets)->capture_default_str();
  tr->add_option("--subsample", tp.subsample)->capture_default_str();
  tr->add_option("--seed", tp.seed)->capture_default_str();

  // experiment
  std::string ex_name, ex_config, ex_out, ex_lang_table;
  auto* ex = app.add_subcommand("experiment", "Run one of the four experiments from a JSON config");
  ex->add_option("NAME", ex_name, "register, size, reliability or simstability")
      ->required()
      ->check(CLI::IsMember({"register", "size", "reliability", "simstability"}));
  ex->add_option("--config", ex_config, "Experiment config (JSON)")->required();
  ex->add_option("--out", ex_out, "Report directory (default: config output_dir)");
  ex->add_option("--lang-table", ex_lang_table, "lang_code<TAB>feature_type file");

  // report
  std::string rp_in, rp_format = "csv", rp_out;
  auto* rp = app.add_subcommand("report", "Render a report.json as CSV, JSON or SVG");
  rp->add_option("--in", rp_in, "report.json produced by an experiment")->required();
  rp->add_option("--format", rp_format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
  rp->add_option("--out", rp_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*sim) {
    const auto lc = sim_lang.config();
    const auto vocab = sim_lang.vocabulary(lc);
    print_warnings(vocab.warnings());
    const auto ca = chunk_corpus(tokenize_file(sim_a, lc), sim_lang.chunk_size, fs::path(sim_a).filename().string());
    const auto cb = chunk_corpus(tokenize_file(sim_b, lc), sim_lang.chunk_size, fs::path(sim_b).filename().string());
    const auto est = corpus_similarity(ca, cb, vocab, sim_opt);
    print_warnings(est.warnings);
    std::cout << to_json(est).dump(2) << "\n";
  } else if (*hom) {
    const auto lc = hom_lang.config();
    const auto vocab = hom_lang.vocabulary(lc);
    print_warnings(vocab.warnings());
    const auto ca = chunk_corpus(tokenize_file(hom_a, lc), hom_lang.chunk_size, fs::path(hom_a).filename().string());
    const auto est = corpus_homogeneity(ca, vocab, hom_opt);
    print_warnings(est.warnings);
    std::cout << to_json(est).dump(2) << "\n";
  } else if (*voc) {
    const auto lc = voc_lang.config();
    const auto vocab = voc_lang.vocabulary(lc);
    print_warnings(vocab.warnings());
    emit(vocab.serialize(), voc_out);
  } else if (*rid) {
    const auto lc = rid_lang.config();
    const auto vocab = rid_lang.vocabulary(lc);
    print_warnings(vocab.warnings());
    std::map<std::string, std::vector<Chunk>> samples;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(rid_dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const auto label = f.stem().string();
      samples[label] = chunk_corpus(tokenize_file(f, lc), rid_lang.chunk_size, label);
    }
    const auto report = cross_validate(samples, vocab, rid_folds, rid_seed);
    print_warnings(report.warnings);
    if (rid_format == "csv") {
      std::cout << accuracy_csv_header() << "\n" << accuracy_csv_row(lc.lang_code, lc.feature_type, report) << "\n";
    } else {
      auto j = to_json(report);
      j["language"] = lc.lang_code;
      j["feature_type"] = to_string(lc.feature_type);
      std::cout << j.dump(2) << "\n";
    }
  } else if (*ov) {
    const auto a = load_embeddings(ov_a);
    const auto b = load_embeddings(ov_b);
    const auto targets = select_target_words(tokenize_file(ov_bg, LangConfig{ov_lang, FeatureType::W1}), ov_targets);
    print_warnings(targets.warnings);
    const auto score = embedding_overlap(a, b, targets.words, ov_nn);
    std::cout << to_json(score, ov_per_word).dump(2) << "\n";
  } else if (*tr) {
    const auto stream = tokenize_file(tr_corpus, LangConfig{tr_lang, FeatureType::W1});
    TrainStats stats;
    const auto embs = train_embeddings(stream, tp, &stats);
    save_embeddings(embs, tr_out);
    save_training_sidecar(tr_out + ".json", tp, stats);
    std::cerr << "trained " << embs.size() << " vectors of dim " << embs.dim() << " on " << stats.corpus_tokens
              << " tokens\n";
  } else if (*ex) {
    const auto table = ex_lang_table.empty() ? LanguageTable::defaults() : LanguageTable::load(ex_lang_table);
    auto config = load_experiment_config(ex_config, table);
    if (!ex_out.empty()) config.output_dir = ex_out;
    if (config.output_dir.empty()) throw ConfigError("set output_dir in the config or pass --out");
    const auto report =
        run_experiment(ex_name, config, [](std::string_view msg) { std::cerr << "[corpsim] " << msg << "\n"; });
    write_report_files(report, config.output_dir);
    std::cerr << "[corpsim] report written to " << config.output_dir.string() << "\n";
  } else if (*rp) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(rp_in));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(rp_in + " is not valid JSON: " + e.what());
    }
    const auto report = Report::from_json(j);
    if (rp_format == "csv") {
      emit(report.to_csv(), rp_out);
    } else if (rp_format == "svg") {
      emit(report.to_svg(), rp_out);
    } else {
      emit(report.to_json().dump(2) + "\n", rp_out);
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const CalibrationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return kInsufficient;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kFormat;
  } catch (const IngestError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
