#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cbir/image.hpp"

namespace cbir {

inline constexpr std::uint64_t kDefaultSplitSeed = 42;

struct CorpusEntry {
  std::filesystem::path path;
  std::string label;
};

struct CorpusScan {
  std::vector<CorpusEntry> entries;     // lexicographic by class, then filename
  std::size_t skipped_files = 0;        // non-image files
  std::vector<std::string> dropped_classes;  // fewer than two candidate images
};

struct ImageRecord {
  std::uint32_t id = 0;
  std::filesystem::path path;
  std::string label;
  Image pixels;
};

struct SplitAssignment {
  std::vector<std::uint32_t> train_ids;  // sorted
  std::vector<std::uint32_t> test_ids;   // sorted
  std::uint64_t seed = kDefaultSplitSeed;

  bool operator==(const SplitAssignment&) const = default;
};

/// Accepted by extension (case-insensitive): png, jpg, jpeg, bmp.
bool has_image_extension(const std::filesystem::path& path);

CorpusScan scan_corpus(const std::filesystem::path& root);

/// Decodes an image file and resamples it bilinearly to 256x256 RGB.
/// Grayscale sources are replicated across the three channels.
Image load_and_resize(const std::filesystem::path& path);

/// Bilinear resample of an in-memory raster (identity when the size already matches).
Image resize_bilinear(const Image& image, int width, int height);

/// Number of training images for a class of `class_size`: round(0.6 * n).
std::size_t train_count_for_class(std::size_t class_size);

/// Stratified per-class shuffle split, deterministic for a fixed seed.
/// `labels[i]` is the class of image id i.
SplitAssignment make_split(const std::vector<std::string>& labels, std::uint64_t seed);

struct IngestReport {
  std::vector<ImageRecord> records;
  std::size_t skipped_files = 0;
  std::size_t undecodable_files = 0;
  std::vector<std::string> dropped_classes;
};

/// Scan, decode and resize a directory-per-class corpus. Files that fail to
/// decode are skipped and counted; classes left with fewer than two images are
/// dropped. Ids are assigned densely in scan order.
IngestReport ingest_corpus(const std::filesystem::path& root);

}  // namespace cbir
