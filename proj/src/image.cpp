#include "cbir/image.hpp"

namespace cbir {

GrayImage to_luma(const Image& image) {
  GrayImage gray(image.width, image.height);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const std::uint8_t* p = image.at(x, y);
      gray.at(x, y) = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
  }
  return gray;
}

Image make_constant_image(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Image image(width, height);
  for (std::size_t i = 0; i < image.rgb.size(); i += 3) {
    image.rgb[i] = r;
    image.rgb[i + 1] = g;
    image.rgb[i + 2] = b;
  }
  return image;
}

}  // namespace cbir
