#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cbir {

enum class MetricId { Canberra, ChiSquare, Euclidean };

inline constexpr MetricId kAllMetrics[] = {MetricId::Canberra, MetricId::ChiSquare, MetricId::Euclidean};

/// Short CLI names: canberra, chisq, euclid.
std::string_view metric_name(MetricId id);
/// Table labels: M1, M2, M3.
std::string_view metric_label(MetricId id);
std::optional<MetricId> parse_metric(std::string_view name);

/// `as_printed` switches Canberra to a '+' numerator and Euclidean to the
/// square root of the L1 sum. Chi-square has a single form.
struct Metric {
  MetricId id = MetricId::Canberra;
  bool as_printed = false;
};

/// sum_i |a_i - b_i| / (|a_i + mean(a)| + |b_i + mean(b)|)
double canberra(std::span<const double> a, std::span<const double> b, bool as_printed = false);

/// sum_i (a_i - b_i)^2 / (|a_i + b_i| / 2). The absolute value only matters
/// for signed inputs such as CLD coefficients.
double chi_square(std::span<const double> a, std::span<const double> b);

double euclidean(std::span<const double> a, std::span<const double> b, bool as_printed = false);

double distance(const Metric& metric, std::span<const double> a, std::span<const double> b);

/// Min-max normalization to [0, 1]; a constant input maps to zeros.
std::vector<double> normalize_distances(std::span<const double> raw);

}  // namespace cbir
