#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpsim/corpus_io.hpp"
#include "corpsim/features.hpp"

namespace corpsim {

struct LabeledSimilarity {
  double value = 0.0;
  std::string pair_category;  ///< "a-b" with the two register labels in ascending order
  bool is_same_register = false;
};

/// Canonical "a-b" category name for a pair of register labels.
std::string pair_category(const std::string& a, const std::string& b);
LabeledSimilarity make_labeled(double value, const std::string& register_a, const std::string& register_b);

struct Threshold {
  double value = 0.0;
  double min_same = 0.0;   ///< lowest same-register category mean
  double max_cross = 0.0;  ///< highest cross-register category mean
  bool overlap = false;    ///< max_cross >= min_same
};

/// Midpoint between the lowest same-register category mean and the highest
/// cross-register category mean. Throws CalibrationError when either class
/// of category is missing.
Threshold calibrate_threshold(std::span<const LabeledSimilarity> train);

enum class RegisterVerdict { Same, Different };

/// Same iff similarity >= threshold.value.
RegisterVerdict classify_pair(double similarity, const Threshold& threshold) noexcept;

struct AccuracyReport {
  std::vector<double> fold_accuracies;
  std::vector<Threshold> fold_thresholds;
  std::vector<std::size_t> fold_test_pairs;
  double mean_accuracy = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const AccuracyReport& report);
/// `language,feature_type,accuracy` header line.
std::string accuracy_csv_header();
/// One row in the accuracy-table layout; accuracy as a whole percentage.
std::string accuracy_csv_row(const std::string& language, FeatureType type, const AccuracyReport& report);

/// Fold assignment for each register's chunks: shuffled with `seed`, then
/// dealt round-robin so every fold sees every register.
std::map<std::string, std::vector<std::size_t>> assign_folds(const std::map<std::string, std::size_t>& chunk_counts,
                                                             std::size_t folds, std::uint64_t seed);

/// Stratified k-fold evaluation of the threshold classifier. Thresholds are
/// calibrated on all training-chunk pairs of a fold; accuracy is measured on
/// pairs formed only from that fold's test chunks.
AccuracyReport cross_validate(const std::map<std::string, std::vector<Chunk>>& samples,
                              const FeatureVocabulary& vocab, std::size_t folds = 5, std::uint64_t seed = 0);

}  // namespace corpsim
