#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cbir {

inline constexpr int kCanonicalSize = 256;

/// Interleaved 8-bit RGB raster, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t* at(int x, int y) { return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const std::uint8_t* at(int x, int y) const {
    return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }

  bool empty() const { return rgb.empty(); }
  bool operator==(const Image&) const = default;
};

/// Single-channel real-valued raster used by the luma-based extractors.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  GrayImage() = default;
  GrayImage(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {}

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// ITU-R BT.601 luma, unrounded.
GrayImage to_luma(const Image& image);

Image make_constant_image(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace cbir
