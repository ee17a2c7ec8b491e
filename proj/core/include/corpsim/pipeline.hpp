#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpsim/corpus_io.hpp"
#include "corpsim/report.hpp"
#include "corpsim/sgns.hpp"

namespace corpsim {

struct RegisterSpec {
  std::string label;
  std::filesystem::path path;
};

enum class SampleMode { Disjoint, Overlapping };

struct ReliabilityConfig {
  std::size_t sample_words = 1'000'000;
  std::size_t n_pairs = 10;
  SampleMode mode = SampleMode::Disjoint;
  /// Refuse to fall back to overlapping samples when the corpus is too small.
  bool strict = false;
};

/// 10M..100M words in steps of 10M.
std::vector<std::size_t> full_grid();
/// 200k..2M words in steps of 200k.
std::vector<std::size_t> desk_grid();

struct ExperimentConfig {
  LangConfig language;
  std::vector<RegisterSpec> registers;
  std::filesystem::path background;
  std::vector<std::size_t> size_grid = desk_grid();
  std::string grid_label = "desk";
  std::size_t chunk_size = kDefaultChunkSize;
  std::size_t pairs = 200;
  std::size_t min_pairs = 10;
  std::size_t targets = 1000;
  std::size_t nn = 10;
  std::size_t vocab_k = 5000;
  TrainParams train;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;  ///< empty: keep everything in memory
  ReliabilityConfig reliability;

  /// Throws ConfigError.
  void validate(bool needs_pairs) const;
};

/// Parses the JSON experiment configuration. Relative paths resolve against
/// `base_dir`. Throws ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, const LanguageTable& languages,
                                  const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path, const LanguageTable& languages);
/// Every effective setting, defaults included. The output directory is not
/// echoed so that reports do not depend on where they were written.
nlohmann::json to_json(const ExperimentConfig& config);

using ProgressFn = std::function<void(std::string_view)>;

Report run_experiment_register(const ExperimentConfig& config, const ProgressFn& progress = {});
Report run_experiment_size(const ExperimentConfig& config, const ProgressFn& progress = {});
Report run_experiment_reliability(const ExperimentConfig& config, const ProgressFn& progress = {});
Report run_experiment_simstability(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Dispatches on "register", "size", "reliability" or "simstability".
Report run_experiment(std::string_view name, const ExperimentConfig& config, const ProgressFn& progress = {});

/// Writes report.json, report.csv and report.svg into `dir`.
void write_report_files(const Report& report, const std::filesystem::path& dir);

}  // namespace corpsim
