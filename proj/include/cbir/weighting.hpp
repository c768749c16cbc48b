#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbir/pool.hpp"
#include "cbir/pr_curve.hpp"
#include "cbir/weight_vector.hpp"

namespace cbir {

enum class RelevanceOracle { GroundTruth, Pseudo };
enum class WeightMethod { RelevantRatio, MeanDifference };

std::optional<RelevanceOracle> parse_oracle(std::string_view text);  // gt | pseudo
std::optional<WeightMethod> parse_method(std::string_view text);     // ratio | meandiff
std::string_view method_name(WeightMethod m);

struct FeedbackConfig {
  RelevanceOracle oracle = RelevanceOracle::GroundTruth;
  std::size_t window = 10;          // K: top-K results inspected
  double increment_factor = 1.1;    // IF, must be > 1
  std::size_t pseudo_top_n = 5;     // pseudo mode: top-N of the uniform ranking are relevant
  std::size_t patience = 3;
  std::size_t max_iterations = 20;
  double step = 0.05;               // mean-difference transfer per iteration

  void validate() const;
};

/// The query's candidate pool together with the set of candidates deemed relevant.
struct FeedbackContext {
  const CandidatePool* pool = nullptr;
  RelevantSet relevant;
  FeedbackConfig config;
};

/// Ground truth: candidates sharing `query_label`. Pseudo: top-N of the
/// uniform-weight ranking.
FeedbackContext make_feedback_context(const CandidatePool& pool, const std::optional<std::string>& query_label,
                                      const FeedbackConfig& config);

/// Per-descriptor PR-AUC of each solo ranking, divided by their sum.
/// Falls back to uniform when every AUC is zero.
WeightVector initial_weights(const FeedbackContext& ctx, std::array<double, kDescriptorCount>* aucs = nullptr);

/// Relevant entries among the first min(K, |ranking|) ids.
std::size_t relevant_count(std::span<const std::uint32_t> ranking, const FeedbackContext& ctx);

struct RatioUpdate {
  std::array<double, kDescriptorCount> weights;  // before renormalization
  bool substituted_zero = false;                 // K_C was 0 and replaced by 1
};

/// W_F <- W_F * IF * K_F / K_C for every descriptor.
RatioUpdate relevant_ratio_update(const std::array<double, kDescriptorCount>& weights, double increment_factor,
                                  const std::array<std::size_t, kDescriptorCount>& solo_counts,
                                  std::size_t combined_count);

/// Method 2 step: move `step` of mass onto `best` from the others,
/// proportionally to their current weights, capping `best` at 1.
std::array<double, kDescriptorCount> mean_difference_step(const std::array<double, kDescriptorCount>& weights,
                                                          Descriptor best, double step);

struct TraceRow {
  std::size_t iteration = 0;
  WeightVector weights;
  double score = 0.0;  // K_C (ratio) or combined AUC (meandiff)
  bool substituted_zero = false;
};

struct WeightingResult {
  WeightMethod method = WeightMethod::RelevantRatio;
  WeightVector weights;
  std::size_t best_iteration = 0;
  double best_score = 0.0;
  std::array<double, kDescriptorCount> initial_aucs{};
  std::array<std::size_t, kDescriptorCount> solo_counts{};
  std::vector<TraceRow> trace;
};

WeightingResult method1_relevant_ratio(const FeedbackContext& ctx);
WeightingResult method2_mean_difference(const FeedbackContext& ctx);
WeightingResult optimize_weights(const FeedbackContext& ctx, WeightMethod method);

/// PR-AUC of the combined ranking under `weights`.
double combined_auc(const FeedbackContext& ctx, const WeightVector& weights);

/// iteration,w_cdh,w_lbp,w_cld,w_eoh,K_C|AUC[,zero_kc]
std::string trace_csv(const WeightingResult& result);

}  // namespace cbir
