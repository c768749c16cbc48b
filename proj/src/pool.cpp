#include "cbir/pool.hpp"

#include <algorithm>
#include <numeric>

#include "cbir/error.hpp"

namespace cbir {

std::array<double, kDescriptorCount> CandidatePool::normalized_at(std::size_t index) const {
  std::array<double, kDescriptorCount> out{};
  for (std::size_t f = 0; f < kDescriptorCount; ++f) out[f] = normalized[f][index];
  return out;
}

CandidatePool build_pool(const DescriptorSet& query, const std::vector<FeatureRecord>& records,
                         std::span<const std::uint32_t> candidate_ids, const Metric& metric) {
  if (candidate_ids.empty()) throw Error(ErrorCode::EmptyCandidatePool, "no candidates to rank");
  CandidatePool pool;
  pool.metric = metric;
  pool.ids.assign(candidate_ids.begin(), candidate_ids.end());
  std::sort(pool.ids.begin(), pool.ids.end());
  pool.labels.reserve(pool.ids.size());
  for (std::uint32_t id : pool.ids) pool.labels.push_back(records.at(id).label);

  for (Descriptor d : kAllDescriptors) {
    const auto f = static_cast<std::size_t>(d);
    const auto& q = query.get(d);
    pool.raw[f].reserve(pool.ids.size());
    for (std::uint32_t id : pool.ids) pool.raw[f].push_back(distance(metric, q, records[id].descriptors.get(d)));
    pool.normalized[f] = normalize_distances(pool.raw[f]);
  }
  return pool;
}

double combine_distances(const std::array<double, kDescriptorCount>& normalized, const WeightVector& weights) {
  double sum = 0.0;
  for (std::size_t f = 0; f < kDescriptorCount; ++f) sum += weights.values()[f] * normalized[f];
  return sum;
}

double combined_distance(const CandidatePool& pool, std::size_t index, const WeightVector& weights) {
  return combine_distances(pool.normalized_at(index), weights);
}

namespace {

std::vector<std::size_t> order_by(const CandidatePool& pool, const std::vector<double>& key) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (key[a] != key[b]) return key[a] < key[b];
    return pool.ids[a] < pool.ids[b];
  });
  return order;
}

}  // namespace

std::vector<std::size_t> rank_pool(const CandidatePool& pool, const WeightVector& weights) {
  std::vector<double> key(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) key[i] = combined_distance(pool, i, weights);
  return order_by(pool, key);
}

std::vector<std::size_t> rank_pool_single(const CandidatePool& pool, Descriptor d) {
  return order_by(pool, pool.normalized[static_cast<std::size_t>(d)]);
}

std::vector<std::uint32_t> ids_in_order(const CandidatePool& pool, std::span<const std::size_t> order) {
  std::vector<std::uint32_t> ids;
  ids.reserve(order.size());
  for (std::size_t i : order) ids.push_back(pool.ids[i]);
  return ids;
}

}  // namespace cbir
