#include "cbir/records.hpp"

namespace cbir {

std::vector<std::string> record_labels(const std::vector<FeatureRecord>& records) {
  std::vector<std::string> labels;
  labels.reserve(records.size());
  for (const auto& r : records) labels.push_back(r.label);
  return labels;
}

}  // namespace cbir
