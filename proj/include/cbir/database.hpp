#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbir/descriptors.hpp"
#include "cbir/ingest.hpp"
#include "cbir/records.hpp"
#include "cbir/svm_index.hpp"

namespace cbir {

inline constexpr std::uint16_t kFormatMajor = 1;
inline constexpr std::uint16_t kFormatMinor = 0;

/// Self-describing header; descriptor constants must match the running code.
struct DatabaseHeader {
  std::uint16_t version_major = kFormatMajor;
  std::uint16_t version_minor = kFormatMinor;
  std::string corpus_root;
  std::uint64_t seed = kDefaultSplitSeed;
  std::array<std::uint32_t, kDescriptorCount> dims = {kCdhDims, kLbpDims, kCldDims, kEohDims};
  std::uint32_t cdh_lightness_levels = kCdhLightnessLevels;
  std::uint32_t cdh_chroma_levels = kCdhChromaLevels;
  std::uint32_t cdh_orientation_bins = kCdhOrientationBins;
  double cdh_chroma_threshold = kCdhChromaThreshold;
  LbpParams lbp;
  CldWeights cld_weights;
  double eoh_threshold = kDefaultEohThreshold;
  bool eoh_block_based = false;
  std::int64_t created_unix = 0;
  bool has_descriptors = false;
  std::uint32_t record_count = 0;

  bool operator==(const DatabaseHeader&) const = default;
};

struct FeatureDatabase {
  DatabaseHeader header;
  std::vector<FeatureRecord> records;
  std::optional<SplitAssignment> split;
  std::optional<IndexModel> model;

  bool operator==(const FeatureDatabase&) const = default;
};

DatabaseHeader make_header(const DescriptorConfig& config);
DescriptorConfig descriptor_config(const DatabaseHeader& header);

/// Throws ConfigMismatch when the header's descriptor constants differ from
/// what this build computes.
void check_descriptor_constants(const DatabaseHeader& header);

/// Layout (little-endian): "CBIR", u16 major, u16 minor, then sections of
/// (4-byte tag, u64 length, payload), then CRC-32 of everything before it.
/// Unknown section tags are skipped on load.
std::vector<std::uint8_t> serialize_database(const FeatureDatabase& db);
FeatureDatabase deserialize_database(std::span<const std::uint8_t> bytes);

/// Appends an opaque section before the trailer and reseals the checksum.
std::vector<std::uint8_t> append_section(std::span<const std::uint8_t> bytes, const std::array<char, 4>& tag,
                                         std::span<const std::uint8_t> payload);

/// Writes through a sibling temp file under an exclusive advisory lock; fails
/// fast if another writer holds it.
void save_database(const FeatureDatabase& db, const std::filesystem::path& path);
FeatureDatabase load_database(const std::filesystem::path& path);

std::string export_json(const FeatureDatabase& db);

}  // namespace cbir
