#include "cbir/weight_vector.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cbir/error.hpp"

namespace cbir {

WeightVector::WeightVector() { values_.fill(1.0 / kDescriptorCount); }

WeightVector::WeightVector(const std::array<double, kDescriptorCount>& values, bool normalize)
    : values_(values), normalized_(false) {
  double total = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::InvalidArgument, "weights must be finite and >= 0");
    total += v;
  }
  if (total <= 0.0) throw Error(ErrorCode::InvalidArgument, "at least one weight must be positive");
  if (normalize) {
    for (double& v : values_) v /= total;
    normalized_ = true;
  }
}

WeightVector WeightVector::one_hot(Descriptor d) {
  std::array<double, kDescriptorCount> v{};
  v[static_cast<std::size_t>(d)] = 1.0;
  return WeightVector(v);
}

WeightVector WeightVector::normalized_copy() const { return WeightVector(values_, true); }

std::array<double, kDescriptorCount> WeightVector::percentages() const {
  const double total = std::accumulate(values_.begin(), values_.end(), 0.0);
  std::array<double, kDescriptorCount> out{};
  for (std::size_t i = 0; i < kDescriptorCount; ++i) out[i] = 100.0 * values_[i] / total;
  return out;
}

std::string WeightVector::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < kDescriptorCount; ++i) os << (i ? "," : "") << values_[i];
  return os.str();
}

WeightVector WeightVector::parse(const std::string& text) {
  std::array<double, kDescriptorCount> v{};
  std::size_t count = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    if (count == kDescriptorCount) throw Error(ErrorCode::InvalidArgument, "expected 4 weights: " + text);
    const std::string token = text.substr(pos, comma - pos);
    std::size_t used = 0;
    try {
      v[count] = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != token.size()) throw Error(ErrorCode::InvalidArgument, "bad weight '" + token + "'");
    ++count;
    pos = comma + 1;
  }
  if (count != kDescriptorCount) throw Error(ErrorCode::InvalidArgument, "expected 4 weights: " + text);
  return WeightVector(v);
}

}  // namespace cbir
