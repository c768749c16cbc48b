#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cbir/pool.hpp"
#include "cbir/svm_index.hpp"
#include "cbir/weighting.hpp"

namespace cbir {

struct RankedEntry {
  std::uint32_t id = 0;
  double combined = 0.0;
  std::array<double, kDescriptorCount> per_descriptor{};
  std::string label;
};

struct RankedList {
  std::optional<std::uint32_t> query_id;  // empty for an external image
  std::vector<RankedEntry> entries;
  WeightVector weights;
  Metric metric;
  std::size_t pool_size = 0;
};

/// A database image, or descriptors of an external image with an optional label.
struct ExternalQuery {
  DescriptorSet descriptors;
  std::optional<std::string> label;
};
using QuerySource = std::variant<std::uint32_t, ExternalQuery>;

struct QueryOptions {
  Metric metric;
  std::optional<WeightVector> weights;       // fixed weights (uniform if neither is set)
  std::optional<WeightMethod> auto_method;   // overrides `weights`
  FeedbackConfig feedback;
  std::size_t top_n = 10;
  bool prune = true;
  std::size_t top_k = 0;  // 0: the model's k
};

struct QueryResult {
  RankedList ranked;
  std::vector<CategoryScore> categories;  // empty when pruning is off
  std::optional<WeightingResult> weighting;
};

/// Candidate ids for a query: records of the top-k predicted classes (or all
/// records when `prune` is false), never including the query itself.
std::vector<std::uint32_t> candidate_ids(const std::vector<FeatureRecord>& records, const IndexModel* model,
                                         const DescriptorSet& query, std::optional<std::uint32_t> query_id,
                                         bool prune, std::size_t top_k, std::vector<CategoryScore>* categories);

/// Full flow: prune, optionally learn weights, rank, truncate to top_n.
/// `model` may be null only when `options.prune` is false.
QueryResult query(const std::vector<FeatureRecord>& records, const IndexModel* model, const QuerySource& source,
                  const QueryOptions& options);

/// Ranked list over the whole pool (not truncated).
RankedList rank_candidates(const CandidatePool& pool, const WeightVector& weights,
                           std::optional<std::uint32_t> query_id);

/// rank,id,label,combined,d_cdh,d_lbp,d_cld,d_eoh
std::string ranked_list_csv(const RankedList& list);

/// Contact sheet of thumbnails; borders are green when the entry shares
/// `query_label`, red otherwise. `paths[id]` locates each image.
std::string contact_sheet_svg(const RankedList& list, const std::vector<FeatureRecord>& records,
                              const std::optional<std::string>& query_label,
                              const std::optional<std::filesystem::path>& query_image);

}  // namespace cbir
