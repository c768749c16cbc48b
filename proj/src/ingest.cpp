#include "cbir/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <random>
#include <system_error>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "cbir/error.hpp"
#include "cbir/parallel.hpp"
#include "random.hpp"

namespace fs = std::filesystem;

namespace cbir {

bool has_image_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

namespace {

std::vector<fs::directory_entry> sorted_entries(const fs::path& dir) {
  std::vector<fs::directory_entry> out;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw Error(ErrorCode::UnreadableDirectory, dir.string() + ": " + ec.message());
  for (const auto& entry : it) out.push_back(entry);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.path().filename() < b.path().filename(); });
  return out;
}

}  // namespace

CorpusScan scan_corpus(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::UnreadableDirectory, root.string() + " is not a readable directory");
  }

  CorpusScan scan;
  for (const auto& class_dir : sorted_entries(root)) {
    if (!class_dir.is_directory()) {
      ++scan.skipped_files;
      continue;
    }
    const std::string label = class_dir.path().filename().string();
    std::vector<CorpusEntry> members;
    for (const auto& file : sorted_entries(class_dir.path())) {
      if (file.is_regular_file() && has_image_extension(file.path())) {
        members.push_back({file.path(), label});
      } else {
        ++scan.skipped_files;
      }
    }
    if (members.size() < 2) {
      scan.dropped_classes.push_back(label);
      continue;
    }
    scan.entries.insert(scan.entries.end(), members.begin(), members.end());
  }
  if (scan.entries.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "no class under " + root.string() + " has two or more images");
  }
  return scan;
}

Image resize_bilinear(const Image& image, int width, int height) {
  if (image.width == width && image.height == height) return image;
  const cv::Mat src(image.height, image.width, CV_8UC3, const_cast<std::uint8_t*>(image.rgb.data()));
  Image out(width, height);
  cv::Mat dst(height, width, CV_8UC3, out.rgb.data());
  cv::resize(src, dst, dst.size(), 0, 0, cv::INTER_LINEAR);
  return out;
}

Image load_and_resize(const fs::path& path) {
  cv::Mat decoded;
  try {
    decoded = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::DecodeError, path.string() + ": " + e.what());
  }
  if (decoded.empty() || decoded.depth() != CV_8U) {
    throw Error(ErrorCode::DecodeError, path.string() + ": not a decodable 8-bit image");
  }
  cv::Mat rgb;
  cv::cvtColor(decoded, rgb, cv::COLOR_BGR2RGB);
  Image image(rgb.cols, rgb.rows);
  for (int y = 0; y < rgb.rows; ++y) {
    std::copy_n(rgb.ptr<std::uint8_t>(y), static_cast<std::size_t>(rgb.cols) * 3, image.at(0, y));
  }
  return resize_bilinear(image, kCanonicalSize, kCanonicalSize);
}

std::size_t train_count_for_class(std::size_t class_size) { return (6 * class_size + 5) / 10; }

SplitAssignment make_split(const std::vector<std::string>& labels, std::uint64_t seed) {
  std::map<std::string, std::vector<std::uint32_t>> by_class;
  for (std::uint32_t id = 0; id < labels.size(); ++id) by_class[labels[id]].push_back(id);

  SplitAssignment split;
  split.seed = seed;
  std::mt19937_64 rng(seed);
  for (auto& [label, ids] : by_class) {
    if (ids.size() < 2) {
      throw Error(ErrorCode::ClassTooSmall, "class '" + label + "' has " + std::to_string(ids.size()) +
                                                " image(s); at least 2 are required");
    }
    detail::shuffle(ids, rng);
    const std::size_t n_train = train_count_for_class(ids.size());
    split.train_ids.insert(split.train_ids.end(), ids.begin(), ids.begin() + n_train);
    split.test_ids.insert(split.test_ids.end(), ids.begin() + n_train, ids.end());
  }
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.test_ids.begin(), split.test_ids.end());
  return split;
}

IngestReport ingest_corpus(const fs::path& root) {
  const CorpusScan scan = scan_corpus(root);

  std::vector<std::optional<Image>> decoded(scan.entries.size());
  parallel_for(scan.entries.size(), [&](std::size_t i) {
    try {
      decoded[i] = load_and_resize(scan.entries[i].path);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DecodeError) throw;
    }
  });

  IngestReport report;
  report.skipped_files = scan.skipped_files;
  report.dropped_classes = scan.dropped_classes;

  std::map<std::string, std::size_t> per_class;
  for (std::size_t i = 0; i < scan.entries.size(); ++i) {
    if (decoded[i]) {
      ++per_class[scan.entries[i].label];
    } else {
      ++report.undecodable_files;
    }
  }
  for (std::size_t i = 0; i < scan.entries.size(); ++i) {
    if (!decoded[i]) continue;
    const auto& entry = scan.entries[i];
    if (per_class[entry.label] < 2) continue;
    ImageRecord record;
    record.id = static_cast<std::uint32_t>(report.records.size());
    record.path = entry.path;
    record.label = entry.label;
    record.pixels = std::move(*decoded[i]);
    report.records.push_back(std::move(record));
  }
  for (const auto& [label, count] : per_class) {
    if (count < 2) report.dropped_classes.push_back(label);
  }
  std::sort(report.dropped_classes.begin(), report.dropped_classes.end());
  if (report.records.empty()) {
    throw Error(ErrorCode::EmptyCorpus, "no class under " + root.string() + " has two or more decodable images");
  }
  return report;
}

}  // namespace cbir
