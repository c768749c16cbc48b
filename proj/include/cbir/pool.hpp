#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cbir/descriptors.hpp"
#include "cbir/metrics.hpp"
#include "cbir/records.hpp"
#include "cbir/weight_vector.hpp"

namespace cbir {

/// Distances from one query to every candidate in a pruned pool, per descriptor.
/// `normalized` is min-max scaled over the pool, so it changes with the pool.
struct CandidatePool {
  Metric metric;
  std::vector<std::uint32_t> ids;  // ascending
  std::vector<std::string> labels;
  std::array<std::vector<double>, kDescriptorCount> raw;
  std::array<std::vector<double>, kDescriptorCount> normalized;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  std::array<double, kDescriptorCount> normalized_at(std::size_t index) const;
};

/// Throws EmptyCandidatePool when `candidate_ids` is empty.
CandidatePool build_pool(const DescriptorSet& query, const std::vector<FeatureRecord>& records,
                         std::span<const std::uint32_t> candidate_ids, const Metric& metric);

/// sum_F w_F * d_F over already-normalized per-descriptor distances.
double combine_distances(const std::array<double, kDescriptorCount>& normalized, const WeightVector& weights);

/// Combined distance of pool entry `index`.
double combined_distance(const CandidatePool& pool, std::size_t index, const WeightVector& weights);

/// Pool indices ordered by ascending combined distance; ties by image id.
std::vector<std::size_t> rank_pool(const CandidatePool& pool, const WeightVector& weights);

/// Ranking by one descriptor alone.
std::vector<std::size_t> rank_pool_single(const CandidatePool& pool, Descriptor d);

/// Image ids in the given pool-index order.
std::vector<std::uint32_t> ids_in_order(const CandidatePool& pool, std::span<const std::size_t> order);

}  // namespace cbir
