#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cbir/ingest.hpp"
#include "cbir/metrics.hpp"
#include "cbir/pr_curve.hpp"
#include "cbir/retrieval.hpp"
#include "cbir/svm_index.hpp"
#include "cbir/weighting.hpp"

namespace cbir {

inline constexpr const char* kCombinedName = "Comb";

struct EvalConfig {
  std::string dataset = "dataset";
  std::size_t n_queries = 50;  // clamped to the test-set size
  std::vector<MetricId> metrics = {MetricId::Canberra, MetricId::ChiSquare, MetricId::Euclidean};
  bool as_printed = false;
  bool single = true;     // one column per descriptor
  bool combined = true;   // learned-weight column
  WeightMethod method = WeightMethod::RelevantRatio;
  FeedbackConfig feedback;
  std::uint64_t seed = 7;
  bool prune = true;
  std::size_t top_k = 0;  // 0: the model's k
};

struct MetricResult {
  MetricId metric = MetricId::Canberra;
  std::vector<double> aucs;     // one per configuration
  std::vector<PRCurve> curves;  // averaged over queries
};

struct PerQueryRow {
  std::uint32_t query_id = 0;
  std::string label;
  MetricId metric = MetricId::Canberra;
  std::string configuration;
  double auc = 0.0;
  std::size_t pool_size = 0;
  std::string weights;  // empty for single-descriptor rows
};

struct ExperimentReport {
  std::string dataset;
  std::vector<std::string> configurations;  // e.g. CDH, LBP, CLD, EOH, Comb
  std::vector<std::uint32_t> query_ids;
  std::vector<MetricResult> results;
  std::vector<PerQueryRow> per_query;
};

/// Queries are sampled from the test split with `config.seed`. The relevant
/// set of a query is every other record of its class, pruned or not.
ExperimentReport batch_evaluate(const std::vector<FeatureRecord>& records, const IndexModel& model,
                                const SplitAssignment& split, const EvalConfig& config);

/// Query ids used by batch_evaluate: a seeded sample of the test ids.
std::vector<std::uint32_t> sample_queries(const SplitAssignment& split, std::size_t n, std::uint64_t seed);

std::string auc_csv(const ExperimentReport& report);
std::string per_query_csv(const ExperimentReport& report);
std::string pr_curves_svg(const ExperimentReport& report);

/// Writes auc.csv, per_query.csv and pr_curves.svg into `out_dir`.
void emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

struct AucCsvRow {
  std::string dataset;
  std::string metric;
  std::vector<double> aucs;
};
std::vector<AucCsvRow> parse_auc_csv(const std::string& text, std::vector<std::string>* header = nullptr);

}  // namespace cbir
