#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cbir/image.hpp"

namespace cbir {

/// Class i varies along one visual factor (i % 4): 0 hue, 1 texture period,
/// 2 spatial color layout, 3 edge orientation. The remaining factors are drawn
/// at random per image, so each class is meant to be separable mainly by the
/// descriptor that sees its factor (CDH, LBP, CLD, EOH respectively).
struct SyntheticSpec {
  std::size_t classes = 4;
  std::size_t per_class = 20;
  std::uint64_t seed = 1;
};

std::string synthetic_class_name(std::size_t index);

struct SyntheticImage {
  std::string label;
  Image image;
};

std::vector<SyntheticImage> generate_synthetic_images(const SyntheticSpec& spec);

/// Writes root/<class>/<nnn>.png; returns the written paths.
std::vector<std::filesystem::path> write_synthetic_corpus(const SyntheticSpec& spec,
                                                          const std::filesystem::path& root);

/// Parses tokens such as {"classes=4", "per-class=20", "seed=3"}.
SyntheticSpec parse_synthetic_spec(const std::vector<std::string>& tokens);

}  // namespace cbir
