#include "cbir/pr_curve.hpp"

#include <algorithm>

#include "cbir/error.hpp"

namespace cbir {

std::vector<PRPoint> pr_points(std::span<const std::uint32_t> ranking, const RelevantSet& relevant) {
  if (relevant.empty()) throw Error(ErrorCode::NoRelevant, "relevant set is empty");
  std::vector<PRPoint> points;
  points.reserve(ranking.size());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    if (relevant.count(ranking[r])) ++hits;
    points.push_back({static_cast<double>(hits) / static_cast<double>(relevant.size()),
                      static_cast<double>(hits) / static_cast<double>(r + 1)});
  }
  return points;
}

double trapezoid_auc(std::span<const double> recall, std::span<const double> precision) {
  double area = 0.0;
  for (std::size_t i = 1; i < recall.size(); ++i) {
    area += (recall[i] - recall[i - 1]) * (precision[i] + precision[i - 1]) / 2.0;
  }
  return area;
}

namespace {

// Trapezoid rule on the uniform recall grid, summed so that a constant curve
// integrates exactly.
double grid_auc(const std::vector<double>& precision) {
  double sum = 0.5 * (precision.front() + precision.back());
  for (std::size_t j = 1; j + 1 < precision.size(); ++j) sum += precision[j];
  return sum / static_cast<double>(precision.size() - 1);
}

}  // namespace

PRCurve pr_curve(std::span<const std::uint32_t> ranking, const RelevantSet& relevant) {
  const std::vector<PRPoint> points = pr_points(ranking, relevant);

  // Running maximum of precision from the end: suffix[r] = max precision at ranks >= r.
  std::vector<double> suffix(points.size() + 1, 0.0);
  for (std::size_t r = points.size(); r-- > 0;) suffix[r] = std::max(suffix[r + 1], points[r].precision);

  PRCurve curve;
  curve.recall.resize(kRecallGridPoints);
  curve.precision.resize(kRecallGridPoints);
  std::size_t first = 0;  // first rank whose recall reaches the grid value
  for (std::size_t j = 0; j < kRecallGridPoints; ++j) {
    const double level = static_cast<double>(j) / static_cast<double>(kRecallGridPoints - 1);
    curve.recall[j] = level;
    while (first < points.size() && points[first].recall < level - 1e-12) ++first;
    curve.precision[j] = suffix[first];
  }
  curve.auc = grid_auc(curve.precision);
  return curve;
}

double raw_pr_auc(std::span<const std::uint32_t> ranking, const RelevantSet& relevant) {
  const std::vector<PRPoint> points = pr_points(ranking, relevant);
  std::vector<double> recall = {0.0}, precision = {0.0};
  double last_recall = 0.0;
  for (const auto& p : points) {
    if (p.recall > last_recall) {
      recall.push_back(p.recall);
      precision.push_back(p.precision);
      last_recall = p.recall;
    }
  }
  return trapezoid_auc(recall, precision);
}

PRCurve average_curves(std::span<const PRCurve> curves) {
  PRCurve mean;
  mean.recall.resize(kRecallGridPoints);
  mean.precision.assign(kRecallGridPoints, 0.0);
  for (std::size_t j = 0; j < kRecallGridPoints; ++j) {
    mean.recall[j] = static_cast<double>(j) / static_cast<double>(kRecallGridPoints - 1);
  }
  if (curves.empty()) return mean;
  for (const auto& c : curves) {
    for (std::size_t j = 0; j < kRecallGridPoints; ++j) mean.precision[j] += c.precision[j];
  }
  for (double& p : mean.precision) p /= static_cast<double>(curves.size());
  mean.auc = grid_auc(mean.precision);
  return mean;
}

}  // namespace cbir
