#include <random>

#include <gtest/gtest.h>

#include "cbir/error.hpp"
#include "cbir/retrieval.hpp"
#include "svg.hpp"
#include "fixtures.hpp"

using namespace cbir;

namespace {

std::vector<std::uint32_t> ids_of(const RankedList& list) {
  std::vector<std::uint32_t> ids;
  for (const auto& e : list.entries) ids.push_back(e.id);
  return ids;
}

QueryOptions unpruned(MetricId metric, std::optional<WeightVector> weights = std::nullopt) {
  QueryOptions o;
  o.metric = {metric, false};
  o.weights = weights;
  o.prune = false;
  return o;
}

}  // namespace

TEST(CombinedDistance, HandArithmetic) {
  CandidatePool pool;
  pool.ids = {0, 1, 2};
  pool.labels = {"a", "b", "c"};
  pool.normalized = {std::vector<double>{0.0, 1.0, 0.4}, std::vector<double>{1.0, 0.0, 0.2},
                     std::vector<double>{0.3, 0.3, 0.3}, std::vector<double>{0.9, 0.9, 0.0}};
  pool.raw = pool.normalized;
  const WeightVector w({0.5, 0.5, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(combined_distance(pool, 0, w), 0.5);
  EXPECT_DOUBLE_EQ(combined_distance(pool, 1, w), 0.5);
  EXPECT_DOUBLE_EQ(combined_distance(pool, 2, w), 0.3);
  EXPECT_EQ(rank_pool(pool, w), (std::vector<std::size_t>{2, 0, 1}));  // 0 and 1 tie, lower id first
  EXPECT_EQ(rank_pool(pool, WeightVector::one_hot(Descriptor::Cdh)), rank_pool_single(pool, Descriptor::Cdh));
}

TEST(BuildPool, NormalizesPerDescriptor) {
  const auto& records = fixture::synthetic_records();
  const std::vector<std::uint32_t> ids{1, 2, 3, 4, 5};
  const CandidatePool pool = build_pool(records[0].descriptors, records, ids, {MetricId::ChiSquare, false});
  for (Descriptor d : kAllDescriptors) {
    const auto& n = pool.normalized[static_cast<int>(d)];
    EXPECT_EQ(*std::min_element(n.begin(), n.end()), 0.0);
    EXPECT_EQ(*std::max_element(n.begin(), n.end()), 1.0);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      EXPECT_NEAR(pool.raw[static_cast<int>(d)][i],
                  fixture::ref_chi_square(fixture::part(records[0].descriptors, static_cast<int>(d)),
                                          fixture::part(records[ids[i]].descriptors, static_cast<int>(d))),
                  1e-12);
    }
  }
  try {
    build_pool(records[0].descriptors, records, std::vector<std::uint32_t>{}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCandidatePool);
  }
}

TEST(Query, MatchesBruteForceWithoutPruning) {
  const auto& records = fixture::synthetic_records();
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    const auto q = static_cast<std::uint32_t>(rng() % records.size());
    const int metric = trial % 3;
    std::array<double, 4> w{};
    for (double& v : w) v = 0.05 + (rng() % 1000) / 1000.0;
    const auto result =
        query(records, nullptr, q, unpruned(static_cast<MetricId>(metric), WeightVector(w, false)));
    EXPECT_EQ(ids_of(result.ranked), fixture::brute_force_top(records, q, metric, w, 10)) << "trial " << trial;
  }
}

TEST(Query, SeparableCorpusPrecisionAndPruning) {
  const auto records = fixture::separable_records(6, 15);
  const IndexModel model = train_index(records, make_split(record_labels(records), 42));
  for (std::uint32_t q : {0u, 17u, 44u, 89u}) {
    QueryOptions pruned;
    const auto with = query(records, &model, q, pruned);
    const auto without = query(records, nullptr, q, unpruned(MetricId::Canberra));
    ASSERT_EQ(with.ranked.entries.size(), 10u);
    for (const auto& e : with.ranked.entries) EXPECT_EQ(e.label, records[q].label);
    EXPECT_EQ(with.categories.front().label, records[q].label);
    EXPECT_EQ(with.ranked.pool_size, 3u * 15 - 1);
    auto a = ids_of(with.ranked), b = ids_of(without.ranked);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}

TEST(Query, ClampingExclusionAndScaleInvariance) {
  const auto& records = fixture::synthetic_records();
  QueryOptions all = unpruned(MetricId::Euclidean);
  all.top_n = 1000;
  const auto full = query(records, nullptr, 7u, all);
  EXPECT_EQ(full.ranked.entries.size(), records.size() - 1);
  for (const auto& e : full.ranked.entries) {
    EXPECT_NE(e.id, 7u);
    for (double d : e.per_descriptor) {
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 1.0);
    }
  }
  for (std::size_t i = 1; i < full.ranked.entries.size(); ++i) {
    const auto& p = full.ranked.entries[i - 1];
    const auto& c = full.ranked.entries[i];
    EXPECT_TRUE(p.combined < c.combined || (p.combined == c.combined && p.id < c.id));
  }
  const auto small = query(records, nullptr, 7u, unpruned(MetricId::Euclidean, WeightVector({1, 2, 3, 4}, false)));
  const auto big = query(records, nullptr, 7u, unpruned(MetricId::Euclidean, WeightVector({4, 8, 12, 16}, false)));
  EXPECT_EQ(ids_of(small.ranked), ids_of(big.ranked));
}

TEST(Query, ExternalImageAndAutoWeights) {
  const auto& records = fixture::synthetic_records();
  ExternalQuery external{records[3].descriptors, records[3].label};
  QueryOptions o = unpruned(MetricId::Canberra);
  o.auto_method = WeightMethod::MeanDifference;
  const auto result = query(records, nullptr, QuerySource{external}, o);
  EXPECT_FALSE(result.ranked.query_id.has_value());
  EXPECT_EQ(result.ranked.pool_size, records.size());
  EXPECT_EQ(result.ranked.entries.front().id, 3u);  // identical descriptors
  ASSERT_TRUE(result.weighting.has_value());
  EXPECT_EQ(result.ranked.weights, result.weighting->weights);
}

TEST(RankedListCsv, HeaderAndRows) {
  const auto& records = fixture::synthetic_records();
  QueryOptions o = unpruned(MetricId::Canberra);
  o.top_n = 3;
  const std::string csv = ranked_list_csv(query(records, nullptr, 0u, o).ranked);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rank,id,label,combined,d_cdh,d_lbp,d_cld,d_eoh");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(ContactSheet, BordersFollowRelevance) {
  const auto& records = fixture::synthetic_records();
  QueryOptions o = unpruned(MetricId::Euclidean, WeightVector::one_hot(Descriptor::Eoh));
  o.top_n = 20;
  const auto result = query(records, nullptr, 0u, o);
  const std::string svg = contact_sheet_svg(result.ranked, records, records[0].label, std::nullopt);
  std::size_t relevant = 0;
  for (const auto& e : result.ranked.entries) relevant += e.label == records[0].label;
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++n;
    return n;
  };
  EXPECT_EQ(count("#2e7d32"), relevant);
  EXPECT_EQ(count("#c62828"), result.ranked.entries.size() - relevant);
  EXPECT_EQ(count("#1565c0"), 1u);
  EXPECT_EQ(svg.rfind("</svg>"), svg.size() - 7);
}

TEST(SvgHelpers, EscapeAndBase64) {
  EXPECT_EQ(detail::xml_escape("a<b>&\"c'"), "a&lt;b&gt;&amp;&quot;c'");
  const std::vector<std::uint8_t> bytes{'M', 'a', 'n'};
  EXPECT_EQ(detail::base64_encode(bytes), "TWFu");
  EXPECT_EQ(detail::base64_encode(std::vector<std::uint8_t>{'M', 'a'}), "TWE=");
}
