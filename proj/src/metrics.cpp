#include "cbir/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cbir/error.hpp"

namespace cbir {

std::string_view metric_name(MetricId id) {
  switch (id) {
    case MetricId::Canberra: return "canberra";
    case MetricId::ChiSquare: return "chisq";
    case MetricId::Euclidean: return "euclid";
  }
  return "?";
}

std::string_view metric_label(MetricId id) {
  switch (id) {
    case MetricId::Canberra: return "M1";
    case MetricId::ChiSquare: return "M2";
    case MetricId::Euclidean: return "M3";
  }
  return "?";
}

std::optional<MetricId> parse_metric(std::string_view name) {
  for (MetricId id : kAllMetrics) {
    if (name == metric_name(id) || name == metric_label(id)) return id;
  }
  return std::nullopt;
}

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::LengthMismatch,
                "vectors of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double canberra(std::span<const double> a, std::span<const double> b, bool as_printed) {
  check_lengths(a, b);
  const double mean_a = mean(a), mean_b = mean(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::abs(a[i] + mean_a) + std::abs(b[i] + mean_b);
    if (denom == 0.0) continue;
    const double numer = as_printed ? std::abs(a[i] + b[i]) : std::abs(a[i] - b[i]);
    sum += numer / denom;
  }
  return sum;
}

double chi_square(std::span<const double> a, std::span<const double> b) {
  check_lengths(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::abs(a[i] + b[i]) / 2.0;
    if (denom == 0.0) continue;
    const double d = a[i] - b[i];
    sum += d * d / denom;
  }
  return sum;
}

double euclidean(std::span<const double> a, std::span<const double> b, bool as_printed) {
  check_lengths(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += as_printed ? std::abs(d) : d * d;
  }
  return std::sqrt(sum);
}

double distance(const Metric& metric, std::span<const double> a, std::span<const double> b) {
  switch (metric.id) {
    case MetricId::Canberra: return canberra(a, b, metric.as_printed);
    case MetricId::ChiSquare: return chi_square(a, b);
    case MetricId::Euclidean: return euclidean(a, b, metric.as_printed);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown metric");
}

std::vector<double> normalize_distances(std::span<const double> raw) {
  std::vector<double> out(raw.size(), 0.0);
  if (raw.empty()) return out;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double range = *hi - *lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - *lo) / range;
  return out;
}

}  // namespace cbir
