#pragma once

#include <cstdint>
#include <filesystem>

#include "cbir/database.hpp"
#include "cbir/ingest.hpp"

namespace cbir {

// Scans and decodes a corpus into a database without descriptors, with a
// stratified split drawn from `seed`.
FeatureDatabase ingest_database(const std::filesystem::path& root, std::uint64_t seed, std::int64_t created_unix = 0,
                                IngestReport* report = nullptr);

// Re-decodes every record and fills in its descriptors. Drops any stale model.
void extract_descriptors(FeatureDatabase& db, const DescriptorConfig& config);

// Trains the category index on the database split and stores it.
const IndexModel& train_database(FeatureDatabase& db, const TrainConfig& config);

}  // namespace cbir
