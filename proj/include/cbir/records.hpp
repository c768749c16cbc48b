#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbir/descriptors.hpp"

namespace cbir {

/// One database row. Records are stored densely: records[i].id == i.
struct FeatureRecord {
  std::uint32_t id = 0;
  std::string label;
  std::string path;
  DescriptorSet descriptors;

  bool operator==(const FeatureRecord&) const = default;
};

/// Class labels of all records, indexed by id.
std::vector<std::string> record_labels(const std::vector<FeatureRecord>& records);

}  // namespace cbir
