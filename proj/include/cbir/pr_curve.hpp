#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

namespace cbir {

inline constexpr std::size_t kRecallGridPoints = 101;

struct PRPoint {
  double recall = 0;
  double precision = 0;
};

struct PRCurve {
  std::vector<double> recall;     // 0, 0.01, ..., 1
  std::vector<double> precision;  // interpolated, non-increasing
  double auc = 0.0;
};

using RelevantSet = std::unordered_set<std::uint32_t>;

/// Raw (recall, precision) after each rank.
std::vector<PRPoint> pr_points(std::span<const std::uint32_t> ranking, const RelevantSet& relevant);

/// Interpolated precision p(r) = max precision at any rank whose recall >= r,
/// sampled on a 101-point recall grid; AUC by the trapezoid rule. Relevant
/// items absent from the ranking still count toward the recall denominator.
/// Throws NoRelevant when `relevant` is empty.
PRCurve pr_curve(std::span<const std::uint32_t> ranking, const RelevantSet& relevant);

/// Area under the raw piecewise-linear curve through (0, 0) and every
/// relevant hit, without interpolation.
double raw_pr_auc(std::span<const std::uint32_t> ranking, const RelevantSet& relevant);

/// Pointwise mean of curves sharing the standard grid (AUC recomputed).
PRCurve average_curves(std::span<const PRCurve> curves);

double trapezoid_auc(std::span<const double> recall, std::span<const double> precision);

}  // namespace cbir
