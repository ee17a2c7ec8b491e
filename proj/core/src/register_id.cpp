#include "corpsim/register_id.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <tuple>

#include "corpsim/errors.hpp"
#include "corpsim/rng.hpp"
#include "corpsim/simcore.hpp"

namespace corpsim {

std::string pair_category(const std::string& a, const std::string& b) {
  return a <= b ? a + "-" + b : b + "-" + a;
}

LabeledSimilarity make_labeled(double value, const std::string& register_a, const std::string& register_b) {
  return LabeledSimilarity{value, pair_category(register_a, register_b), register_a == register_b};
}

Threshold calibrate_threshold(std::span<const LabeledSimilarity> train) {
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
    bool same = false;
  };
  std::map<std::string, Acc> categories;
  for (const auto& s : train) {
    auto& acc = categories[s.pair_category];
    acc.sum += s.value;
    ++acc.n;
    acc.same = s.is_same_register;
  }
  bool have_same = false, have_cross = false;
  Threshold t;
  for (const auto& [name, acc] : categories) {
    const double mean = acc.sum / static_cast<double>(acc.n);
    if (acc.same) {
      t.min_same = have_same ? std::min(t.min_same, mean) : mean;
      have_same = true;
    } else {
      t.max_cross = have_cross ? std::max(t.max_cross, mean) : mean;
      have_cross = true;
    }
  }
  if (!have_same) throw CalibrationError("no same-register pairs to calibrate from");
  if (!have_cross) throw CalibrationError("no cross-register pairs to calibrate from");
  t.value = (t.min_same + t.max_cross) / 2.0;
  t.overlap = t.max_cross >= t.min_same;
  return t;
}

RegisterVerdict classify_pair(double similarity, const Threshold& threshold) noexcept {
  return similarity >= threshold.value ? RegisterVerdict::Same : RegisterVerdict::Different;
}

nlohmann::json to_json(const AccuracyReport& report) {
  nlohmann::json thresholds = nlohmann::json::array();
  for (const auto& t : report.fold_thresholds) {
    thresholds.push_back({{"value", t.value}, {"min_same", t.min_same}, {"max_cross", t.max_cross},
                          {"overlap", t.overlap}});
  }
  return nlohmann::json{{"fold_accuracies", report.fold_accuracies},
                        {"fold_thresholds", thresholds},
                        {"fold_test_pairs", report.fold_test_pairs},
                        {"mean_accuracy", report.mean_accuracy},
                        {"seed", report.seed},
                        {"warnings", report.warnings}};
}

std::string accuracy_csv_header() { return "language,feature_type,accuracy"; }

std::string accuracy_csv_row(const std::string& language, FeatureType type, const AccuracyReport& report) {
  char pct[32];
  std::snprintf(pct, sizeof pct, "%.0f%%", report.mean_accuracy * 100.0);
  return language + "," + std::string(to_string(type)) + "," + pct;
}

std::map<std::string, std::vector<std::size_t>> assign_folds(const std::map<std::string, std::size_t>& chunk_counts,
                                                             std::size_t folds, std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (const auto& [label, n] : chunk_counts) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(subseed(seed, "folds/" + label));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform(i)]);
    std::vector<std::size_t> fold_of(n);
    for (std::size_t pos = 0; pos < n; ++pos) fold_of[order[pos]] = pos % folds;
    out.emplace(label, std::move(fold_of));
  }
  return out;
}

AccuracyReport cross_validate(const std::map<std::string, std::vector<Chunk>>& samples,
                              const FeatureVocabulary& vocab, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (samples.size() < 2) throw InsufficientDataError("register identification needs at least two registers");
  std::map<std::string, std::size_t> counts;
  for (const auto& [label, chunks] : samples) {
    if (chunks.size() < folds) {
      throw InsufficientDataError("register '" + label + "' has " + std::to_string(chunks.size()) +
                                  " chunks; need at least " + std::to_string(folds));
    }
    counts[label] = chunks.size();
  }

  struct Item {
    const std::string* label;
    RankedVector ranks;
    std::size_t fold;
  };
  const auto fold_map = assign_folds(counts, folds, seed);
  std::vector<Item> items;
  for (const auto& [label, chunks] : samples) {
    const auto& fold_of = fold_map.at(label);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      items.push_back(Item{&label, rank_vector(vectorize(chunks[i], vocab)), fold_of[i]});
    }
  }

  AccuracyReport report;
  report.seed = seed;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<LabeledSimilarity> train;
    std::size_t correct = 0, total = 0;
    std::vector<std::tuple<double, bool>> test;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      for (std::size_t j = i + 1; j < items.size(); ++j) {
        const bool train_pair = items[i].fold != f && items[j].fold != f;
        const bool test_pair = items[i].fold == f && items[j].fold == f;
        if (!train_pair && !test_pair) continue;
        double rho;
        try {
          rho = rho_from_ranks(items[i].ranks, items[j].ranks);
        } catch (const DegenerateVectorError&) {
          ++skipped;
          continue;
        }
        if (train_pair) {
          train.push_back(make_labeled(rho, *items[i].label, *items[j].label));
        } else {
          test.emplace_back(rho, *items[i].label == *items[j].label);
        }
      }
    }
    if (skipped) {
      report.warnings.push_back("fold " + std::to_string(f) + ": skipped " + std::to_string(skipped) +
                                " degenerate pairs");
    }
    const Threshold threshold = calibrate_threshold(train);
    if (threshold.overlap) {
      report.warnings.push_back("fold " + std::to_string(f) +
                                ": cross-register mean reaches same-register mean; threshold is unreliable");
    }
    for (const auto& [rho, same] : test) {
      const bool predicted_same = classify_pair(rho, threshold) == RegisterVerdict::Same;
      correct += predicted_same == same ? 1 : 0;
      ++total;
    }
    if (total == 0) throw InsufficientDataError("fold " + std::to_string(f) + " has no scorable test pairs");
    report.fold_accuracies.push_back(static_cast<double>(correct) / static_cast<double>(total));
    report.fold_thresholds.push_back(threshold);
    report.fold_test_pairs.push_back(total);
  }
  report.mean_accuracy = std::accumulate(report.fold_accuracies.begin(), report.fold_accuracies.end(), 0.0) /
                         static_cast<double>(folds);
  return report;
}

}  // namespace corpsim
