#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbir/descriptors.hpp"
#include "cbir/ingest.hpp"
#include "cbir/records.hpp"

namespace cbir {

/// All four descriptors back to back: CDH, LBP, CLD, EOH.
std::vector<double> concatenate(const DescriptorSet& descriptors);

/// Per-dimension min-max scaling fitted on training data. Constant dimensions
/// map to 0; values outside the training range are not clipped.
struct FeatureScaler {
  std::vector<double> min;
  std::vector<double> max;

  static FeatureScaler fit(std::span<const std::vector<double>> rows);
  std::vector<double> apply(std::span<const double> x) const;
  std::size_t dims() const { return min.size(); }

  bool operator==(const FeatureScaler&) const = default;
};

struct CategoryModel {
  std::string label;
  std::vector<double> weights;
  double bias = 0.0;

  double score(std::span<const double> scaled) const;
  bool operator==(const CategoryModel&) const = default;
};

struct TrainConfig {
  double c = 1.0;
  int epochs = 200;
  std::uint64_t seed = 42;
  std::size_t top_k = 3;

  bool operator==(const TrainConfig&) const = default;
};

struct CategoryScore {
  std::string label;
  double score = 0.0;
};

struct IndexModel {
  std::vector<CategoryModel> models;  // sorted by label
  FeatureScaler scaler;
  TrainConfig config;
  double test_accuracy = 0.0;  // held-out top-1, argmax over class scores

  std::size_t k() const { return config.top_k; }
  /// Scores for every class, in `models` order.
  std::vector<CategoryScore> score_all(const DescriptorSet& descriptors) const;

  bool operator==(const IndexModel&) const = default;
};

/// Binary linear SVM on +1/-1 targets: minimizes
///   lambda/2 |w|^2 + 1/n sum_i max(0, 1 - y_i (w.x_i + b)),  lambda = 1/(C n),
/// by Pegasos-style stochastic subgradient steps with a seeded epoch order.
CategoryModel train_binary_svm(std::span<const std::vector<double>> rows, std::span<const int> targets,
                               const TrainConfig& config, std::uint64_t seed);

/// One-vs-rest models over min-max scaled concatenated descriptors, trained on
/// `split.train_ids`; `test_accuracy` is measured on `split.test_ids`.
IndexModel train_index(const std::vector<FeatureRecord>& records, const SplitAssignment& split,
                       const TrainConfig& config = {});

/// Descending score, ties by label; min(k, classes) entries. `k == 0` uses the
/// model's configured k.
std::vector<CategoryScore> predict_top_categories(const IndexModel& model, const DescriptorSet& query,
                                                  std::size_t k = 0);

/// Fraction of `ids` whose true label is among the top-k predicted labels.
double top_k_accuracy(const IndexModel& model, const std::vector<FeatureRecord>& records,
                      std::span<const std::uint32_t> ids, std::size_t k);

/// Ids (ascending) of all records whose label is in `labels`, minus `exclude`.
std::vector<std::uint32_t> reduce_search_space(const std::vector<FeatureRecord>& records,
                                               std::span<const std::string> labels,
                                               std::optional<std::uint32_t> exclude = std::nullopt);

}  // namespace cbir
