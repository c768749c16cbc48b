#include "cbir/svm_index.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "cbir/error.hpp"
#include "cbir/parallel.hpp"
#include "random.hpp"

namespace cbir {

std::vector<double> concatenate(const DescriptorSet& d) {
  std::vector<double> x;
  x.reserve(d.cdh.size() + d.lbp.size() + d.cld.size() + d.eoh.size());
  for (Descriptor desc : kAllDescriptors) {
    const auto& v = d.get(desc);
    x.insert(x.end(), v.begin(), v.end());
  }
  return x;
}

FeatureScaler FeatureScaler::fit(std::span<const std::vector<double>> rows) {
  FeatureScaler scaler;
  if (rows.empty()) return scaler;
  scaler.min = rows.front();
  scaler.max = rows.front();
  for (const auto& row : rows) {
    if (row.size() != scaler.min.size()) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
    for (std::size_t j = 0; j < row.size(); ++j) {
      scaler.min[j] = std::min(scaler.min[j], row[j]);
      scaler.max[j] = std::max(scaler.max[j], row[j]);
    }
  }
  return scaler;
}

std::vector<double> FeatureScaler::apply(std::span<const double> x) const {
  if (x.size() != min.size()) {
    throw Error(ErrorCode::DimensionMismatch, "feature vector has " + std::to_string(x.size()) +
                                                  " dims, model expects " + std::to_string(min.size()));
  }
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double range = max[j] - min[j];
    out[j] = range > 0.0 ? (x[j] - min[j]) / range : 0.0;
  }
  return out;
}

double CategoryModel::score(std::span<const double> scaled) const {
  double s = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * scaled[j];
  return s;
}

CategoryModel train_binary_svm(std::span<const std::vector<double>> rows, std::span<const int> targets,
                               const TrainConfig& config, std::uint64_t seed) {
  if (rows.empty() || rows.size() != targets.size()) {
    throw Error(ErrorCode::InvalidArgument, "SVM needs one target per training row");
  }
  if (config.c <= 0.0 || config.epochs < 1) {
    throw Error(ErrorCode::InvalidArgument, "SVM needs C > 0 and at least one epoch");
  }
  const std::size_t n = rows.size();
  const std::size_t dims = rows.front().size();
  const double lambda = 1.0 / (config.c * static_cast<double>(n));
  const double radius = 1.0 / std::sqrt(lambda);

  // The bias is learned as the weight of a constant feature.
  std::vector<double> w(dims + 1, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::uint64_t step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    detail::shuffle(order, rng);
    for (std::size_t i : order) {
      ++step;
      const double eta = 1.0 / (lambda * static_cast<double>(step));
      const auto& x = rows[i];
      const double y = targets[i];
      double margin = w[dims];
      for (std::size_t j = 0; j < dims; ++j) margin += w[j] * x[j];
      margin *= y;

      const double shrink = 1.0 - eta * lambda;
      for (double& wj : w) wj *= shrink;
      if (margin < 1.0) {
        for (std::size_t j = 0; j < dims; ++j) w[j] += eta * y * x[j];
        w[dims] += eta * y;
      }
      const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
      if (norm > radius) {
        const double s = radius / norm;
        for (double& wj : w) wj *= s;
      }
    }
  }

  CategoryModel model;
  model.bias = w[dims];
  w.pop_back();
  model.weights = std::move(w);
  return model;
}

IndexModel train_index(const std::vector<FeatureRecord>& records, const SplitAssignment& split,
                       const TrainConfig& config) {
  std::set<std::string> classes;
  for (const auto& r : records) classes.insert(r.label);
  if (classes.size() < 2) throw Error(ErrorCode::InvalidArgument, "indexing needs at least two classes");
  if (config.top_k == 0) throw Error(ErrorCode::InvalidArgument, "top-k must be at least 1");

  std::vector<std::vector<double>> raw;
  std::vector<std::string> train_labels;
  for (std::uint32_t id : split.train_ids) {
    if (id >= records.size()) throw Error(ErrorCode::InvalidArgument, "split refers to unknown id");
    raw.push_back(concatenate(records[id].descriptors));
    train_labels.push_back(records[id].label);
  }
  for (const auto& label : classes) {
    if (std::find(train_labels.begin(), train_labels.end(), label) == train_labels.end()) {
      throw Error(ErrorCode::ClassTooSmall, "class '" + label + "' has no training image");
    }
  }

  IndexModel index;
  index.config = config;
  index.scaler = FeatureScaler::fit(raw);
  std::vector<std::vector<double>> scaled;
  scaled.reserve(raw.size());
  for (const auto& row : raw) scaled.push_back(index.scaler.apply(row));

  const bool degenerate = std::all_of(scaled.begin(), scaled.end(), [&](const auto& row) {
    return std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
  });
  if (degenerate) throw Error(ErrorCode::DegenerateClass, "all training vectors are identical");

  const std::vector<std::string> labels(classes.begin(), classes.end());
  index.models.resize(labels.size());
  parallel_for(labels.size(), [&](std::size_t c) {
    std::vector<int> targets(train_labels.size());
    for (std::size_t i = 0; i < train_labels.size(); ++i) targets[i] = train_labels[i] == labels[c] ? 1 : -1;
    CategoryModel model = train_binary_svm(scaled, targets, config, detail::mix_seed(config.seed, c));
    model.label = labels[c];
    index.models[c] = std::move(model);
  });

  index.test_accuracy = split.test_ids.empty() ? 0.0 : top_k_accuracy(index, records, split.test_ids, 1);
  return index;
}

std::vector<CategoryScore> IndexModel::score_all(const DescriptorSet& descriptors) const {
  const std::vector<double> scaled = scaler.apply(concatenate(descriptors));
  std::vector<CategoryScore> scores;
  scores.reserve(models.size());
  for (const auto& m : models) scores.push_back({m.label, m.score(scaled)});
  return scores;
}

std::vector<CategoryScore> predict_top_categories(const IndexModel& model, const DescriptorSet& query,
                                                  std::size_t k) {
  std::vector<CategoryScore> scores = model.score_all(query);
  std::sort(scores.begin(), scores.end(), [](const CategoryScore& a, const CategoryScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.label < b.label;
  });
  const std::size_t keep = std::min(k == 0 ? model.k() : k, scores.size());
  scores.resize(keep);
  return scores;
}

double top_k_accuracy(const IndexModel& model, const std::vector<FeatureRecord>& records,
                      std::span<const std::uint32_t> ids, std::size_t k) {
  if (ids.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::uint32_t id : ids) {
    const auto top = predict_top_categories(model, records.at(id).descriptors, k);
    if (std::any_of(top.begin(), top.end(), [&](const auto& s) { return s.label == records[id].label; })) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ids.size());
}

std::vector<std::uint32_t> reduce_search_space(const std::vector<FeatureRecord>& records,
                                               std::span<const std::string> labels,
                                               std::optional<std::uint32_t> exclude) {
  const std::set<std::string> wanted(labels.begin(), labels.end());
  std::vector<std::uint32_t> ids;
  for (const auto& r : records) {
    if (exclude && r.id == *exclude) continue;
    if (wanted.count(r.label)) ids.push_back(r.id);
  }
  return ids;
}

}  // namespace cbir
