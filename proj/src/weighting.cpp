#include "cbir/weighting.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "cbir/error.hpp"
#include "format.hpp"

namespace cbir {

std::optional<RelevanceOracle> parse_oracle(std::string_view text) {
  if (text == "gt" || text == "ground-truth") return RelevanceOracle::GroundTruth;
  if (text == "pseudo") return RelevanceOracle::Pseudo;
  return std::nullopt;
}

std::optional<WeightMethod> parse_method(std::string_view text) {
  if (text == "ratio") return WeightMethod::RelevantRatio;
  if (text == "meandiff") return WeightMethod::MeanDifference;
  return std::nullopt;
}

std::string_view method_name(WeightMethod m) {
  return m == WeightMethod::RelevantRatio ? "ratio" : "meandiff";
}

void FeedbackConfig::validate() const {
  if (window < 1) throw Error(ErrorCode::InvalidArgument, "feedback window K must be >= 1");
  if (!(increment_factor > 1.0)) throw Error(ErrorCode::InvalidArgument, "increment factor must be > 1");
  if (pseudo_top_n < 1) throw Error(ErrorCode::InvalidArgument, "pseudo top-N must be >= 1");
  if (patience < 1) throw Error(ErrorCode::InvalidArgument, "patience must be >= 1");
  if (!(step > 0.0 && step <= 1.0)) throw Error(ErrorCode::InvalidArgument, "step must be in (0, 1]");
}

FeedbackContext make_feedback_context(const CandidatePool& pool, const std::optional<std::string>& query_label,
                                      const FeedbackConfig& config) {
  config.validate();
  if (pool.empty()) throw Error(ErrorCode::EmptyCandidatePool, "no candidates for feedback");
  FeedbackContext ctx;
  ctx.pool = &pool;
  ctx.config = config;
  if (config.oracle == RelevanceOracle::GroundTruth) {
    if (!query_label) throw Error(ErrorCode::InvalidArgument, "ground-truth feedback needs the query's label");
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool.labels[i] == *query_label) ctx.relevant.insert(pool.ids[i]);
    }
  } else {
    const std::vector<std::size_t> order = rank_pool(pool, WeightVector());
    const std::size_t n = std::min(config.pseudo_top_n, order.size());
    for (std::size_t r = 0; r < n; ++r) ctx.relevant.insert(pool.ids[order[r]]);
  }
  return ctx;
}

namespace {

const CandidatePool& pool_of(const FeedbackContext& ctx) {
  if (!ctx.pool || ctx.pool->empty()) throw Error(ErrorCode::EmptyCandidatePool, "no candidates for feedback");
  return *ctx.pool;
}

double ranking_auc(const FeedbackContext& ctx, const std::vector<std::size_t>& order) {
  if (ctx.relevant.empty()) return 0.0;
  return pr_curve(ids_in_order(*ctx.pool, order), ctx.relevant).auc;
}

std::size_t ranking_count(const FeedbackContext& ctx, const std::vector<std::size_t>& order) {
  return relevant_count(ids_in_order(*ctx.pool, order), ctx);
}

}  // namespace

WeightVector initial_weights(const FeedbackContext& ctx, std::array<double, kDescriptorCount>* aucs) {
  const CandidatePool& pool = pool_of(ctx);
  std::array<double, kDescriptorCount> solo{};
  for (Descriptor d : kAllDescriptors) {
    solo[static_cast<std::size_t>(d)] = ranking_auc(ctx, rank_pool_single(pool, d));
  }
  if (aucs) *aucs = solo;
  if (std::accumulate(solo.begin(), solo.end(), 0.0) <= 0.0) return WeightVector();
  return WeightVector(solo);
}

std::size_t relevant_count(std::span<const std::uint32_t> ranking, const FeedbackContext& ctx) {
  const std::size_t n = std::min(ctx.config.window, ranking.size());
  std::size_t count = 0;
  for (std::size_t r = 0; r < n; ++r) count += ctx.relevant.count(ranking[r]);
  return count;
}

RatioUpdate relevant_ratio_update(const std::array<double, kDescriptorCount>& weights, double increment_factor,
                                  const std::array<std::size_t, kDescriptorCount>& solo_counts,
                                  std::size_t combined_count) {
  RatioUpdate update;
  update.substituted_zero = combined_count == 0;
  const double kc = update.substituted_zero ? 1.0 : static_cast<double>(combined_count);
  for (std::size_t f = 0; f < kDescriptorCount; ++f) {
    update.weights[f] = weights[f] * increment_factor * (static_cast<double>(solo_counts[f]) / kc);
  }
  return update;
}

std::array<double, kDescriptorCount> mean_difference_step(const std::array<double, kDescriptorCount>& weights,
                                                          Descriptor best, double step) {
  const auto b = static_cast<std::size_t>(best);
  std::array<double, kDescriptorCount> next = weights;
  const double current = weights[b];
  const double target = std::min(1.0, current + step);
  if (target >= 1.0 - 1e-12 || current >= 1.0) {
    next.fill(0.0);
    next[b] = 1.0;
    return next;
  }
  const double shrink = (1.0 - target) / (1.0 - current);
  for (std::size_t f = 0; f < kDescriptorCount; ++f) next[f] = f == b ? target : weights[f] * shrink;
  return next;
}

double combined_auc(const FeedbackContext& ctx, const WeightVector& weights) {
  return ranking_auc(ctx, rank_pool(pool_of(ctx), weights));
}

WeightingResult method1_relevant_ratio(const FeedbackContext& ctx) {
  const CandidatePool& pool = pool_of(ctx);
  ctx.config.validate();
  WeightingResult result;
  result.method = WeightMethod::RelevantRatio;

  WeightVector weights = initial_weights(ctx, &result.initial_aucs);
  for (Descriptor d : kAllDescriptors) {
    result.solo_counts[static_cast<std::size_t>(d)] = ranking_count(ctx, rank_pool_single(pool, d));
  }

  std::size_t kc = ranking_count(ctx, rank_pool(pool, weights));
  result.trace.push_back({0, weights, static_cast<double>(kc), false});
  result.weights = weights;
  result.best_score = static_cast<double>(kc);
  std::size_t best_kc = kc;
  std::size_t stale = 0;

  for (std::size_t it = 1; it <= ctx.config.max_iterations; ++it) {
    const RatioUpdate update =
        relevant_ratio_update(weights.values(), ctx.config.increment_factor, result.solo_counts, kc);
    if (std::accumulate(update.weights.begin(), update.weights.end(), 0.0) <= 0.0) break;
    weights = WeightVector(update.weights);
    kc = ranking_count(ctx, rank_pool(pool, weights));
    result.trace.push_back({it, weights, static_cast<double>(kc), update.substituted_zero});
    if (kc > best_kc) {
      best_kc = kc;
      result.weights = weights;
      result.best_iteration = it;
      result.best_score = static_cast<double>(kc);
      stale = 0;
    } else if (++stale >= ctx.config.patience) {
      break;
    }
  }
  return result;
}

WeightingResult method2_mean_difference(const FeedbackContext& ctx) {
  const CandidatePool& pool = pool_of(ctx);
  ctx.config.validate();
  WeightingResult result;
  result.method = WeightMethod::MeanDifference;

  WeightVector weights = initial_weights(ctx, &result.initial_aucs);
  for (Descriptor d : kAllDescriptors) {
    result.solo_counts[static_cast<std::size_t>(d)] = ranking_count(ctx, rank_pool_single(pool, d));
  }

  const auto& init = weights.values();
  const auto best = static_cast<Descriptor>(std::max_element(init.begin(), init.end()) - init.begin());

  double auc = combined_auc(ctx, weights);
  result.trace.push_back({0, weights, auc, false});
  result.weights = weights;
  result.best_score = auc;

  for (std::size_t it = 1; weights[best] < 1.0; ++it) {
    weights = WeightVector(mean_difference_step(weights.values(), best, ctx.config.step));
    auc = combined_auc(ctx, weights);
    result.trace.push_back({it, weights, auc, false});
    if (auc > result.best_score) {
      result.best_score = auc;
      result.weights = weights;
      result.best_iteration = it;
    }
  }
  return result;
}

WeightingResult optimize_weights(const FeedbackContext& ctx, WeightMethod method) {
  return method == WeightMethod::RelevantRatio ? method1_relevant_ratio(ctx) : method2_mean_difference(ctx);
}

std::string trace_csv(const WeightingResult& result) {
  const bool ratio = result.method == WeightMethod::RelevantRatio;
  std::ostringstream os;
  os << "iteration,w_cdh,w_lbp,w_cld,w_eoh," << (ratio ? "K_C" : "AUC");
  if (ratio) os << ",zero_kc";
  os << '\n';
  for (const auto& row : result.trace) {
    os << row.iteration;
    for (double w : row.weights.values()) os << ',' << detail::fixed(w, 8);
    if (ratio) {
      os << ',' << static_cast<std::size_t>(row.score) << ',' << (row.substituted_zero ? 1 : 0);
    } else {
      os << ',' << detail::fixed(row.score, 6);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace cbir
