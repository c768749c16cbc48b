#pragma once

#include <array>
#include <span>
#include <string>

#include "cbir/descriptors.hpp"

namespace cbir {

/// Non-negative per-descriptor weights in CDH, LBP, CLD, EOH order.
class WeightVector {
 public:
  /// Uniform, normalized.
  WeightVector();
  /// Throws InvalidArgument on negative, non-finite or all-zero entries.
  explicit WeightVector(const std::array<double, kDescriptorCount>& values, bool normalize = true);

  static WeightVector one_hot(Descriptor d);

  double operator[](Descriptor d) const { return values_[static_cast<std::size_t>(d)]; }
  const std::array<double, kDescriptorCount>& values() const { return values_; }
  bool normalized() const { return normalized_; }

  WeightVector normalized_copy() const;
  std::array<double, kDescriptorCount> percentages() const;

  /// "a,b,c,d" with full round-trip precision.
  std::string to_string() const;
  /// Parses "a,b,c,d" (normalizes).
  static WeightVector parse(const std::string& text);

  bool operator==(const WeightVector&) const = default;

 private:
  std::array<double, kDescriptorCount> values_;
  bool normalized_ = true;
};

}  // namespace cbir
