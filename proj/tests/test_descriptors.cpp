#include <numbers>
#include <numeric>
#include <random>

#include <gtest/gtest.h>
#include <opencv2/imgcodecs.hpp>

#include "cbir/descriptors.hpp"
#include "cbir/ingest.hpp"
#include "fixtures.hpp"

using namespace cbir;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

Image half_split(int w, int h, std::uint8_t left, std::uint8_t right) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y)[c] = x < w / 2 ? left : right;
  return img;
}

Image random_image(int w, int h, unsigned seed) {
  std::mt19937 rng(seed);
  Image img(w, h);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng() % 256);
  return img;
}

// Direct evaluation of the orthonormal 2-D DCT-II coefficient (u, v).
double ref_dct(const std::array<double, 64>& grid, int u, int v) {
  double s = 0;
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      s += grid[y * 8 + x] * std::cos((2 * y + 1) * u * std::numbers::pi / 16) *
           std::cos((2 * x + 1) * v * std::numbers::pi / 16);
  const double cu = u == 0 ? std::sqrt(1.0 / 8) : std::sqrt(2.0 / 8);
  const double cv = v == 0 ? std::sqrt(1.0 / 8) : std::sqrt(2.0 / 8);
  return cu * cv * s;
}

}  // namespace

TEST(Lab, ReferenceColours) {
  const Lab white = srgb_to_lab(255, 255, 255);
  EXPECT_NEAR(white.l, 100.0, 1e-3);
  EXPECT_NEAR(white.a, 0.0, 1e-2);
  EXPECT_NEAR(white.b, 0.0, 1e-2);
  const Lab black = srgb_to_lab(0, 0, 0);
  EXPECT_NEAR(black.l, 0.0, 1e-9);
  const Lab red = srgb_to_lab(255, 0, 0);
  EXPECT_NEAR(red.l, 53.24, 0.05);
  EXPECT_NEAR(red.a, 80.09, 0.1);
  EXPECT_NEAR(red.b, 67.20, 0.1);
  EXPECT_EQ(quantize_lab(red), (5 * 3 + 2) * 3 + 2);
  EXPECT_EQ(quantize_lab(white), (9 * 3 + 1) * 3 + 1);
  EXPECT_EQ(quantize_orientation(0), 0);
  EXPECT_EQ(quantize_orientation(-90), 13);
  EXPECT_EQ(quantize_orientation(359.9), 17);
}

TEST(Cdh, ConstantImageIsUniform) {
  const auto cdh = compute_cdh(make_constant_image(64, 64, 30, 60, 90));
  ASSERT_EQ(cdh.size(), kCdhDims);
  for (double v : cdh) EXPECT_DOUBLE_EQ(v, 1.0 / 108);
}

TEST(Cdh, HalfSplitFourByFourTrace) {
  // Interior is the 2x2 block (1..2, 1..2). Horizontal pairs join black and
  // white (difference 100, different colour bins) and share orientation 0
  // (gradient points right). Vertical pairs have zero difference. All mass
  // lands on the first orientation bin.
  const auto cdh = compute_cdh(half_split(4, 4, 0, 255));
  std::vector<double> expected(kCdhDims, 0.0);
  expected[kCdhColorBins + 0] = 1.0;
  for (std::size_t i = 0; i < kCdhDims; ++i) EXPECT_NEAR(cdh[i], expected[i], 1e-12) << i;
}

TEST(Cdh, NormalizedOnTexture) {
  const auto cdh = compute_cdh(random_image(40, 30, 1));
  EXPECT_NEAR(sum(cdh), 1.0, 1e-9);
  for (double v : cdh) EXPECT_GE(v, 0.0);
}

TEST(Lbp, HandEvaluatedCode) {
  GrayImage g(3, 3);
  const double values[3][3] = {{1, 9, 1}, {9, 5, 9}, {1, 9, 1}};  // rows top to bottom
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) g.at(x, y) = values[y][x];
  const auto codes = lbp_codes(g);
  ASSERT_EQ(codes.size(), 1u);
  EXPECT_EQ(codes[0], 85);
}

TEST(Lbp, ConstantImageIsIndicatorAt255) {
  const auto lbp = compute_lbp(make_constant_image(32, 32, 128, 128, 128));
  ASSERT_EQ(lbp.size(), 256u);
  for (int i = 0; i < 255; ++i) EXPECT_EQ(lbp[i], 0.0);
  EXPECT_EQ(lbp[255], 1.0);
}

TEST(Lbp, MonotoneRemapInvariance) {
  const GrayImage g = to_luma(random_image(48, 48, 2));
  GrayImage remapped = g;
  for (double& v : remapped.values) v = 3.0 + 16.0 * std::sqrt(v) + 0.001 * v * v;
  EXPECT_EQ(lbp_codes(g), lbp_codes(remapped));
}

TEST(Lbp, CircularVariantStaysInRange) {
  const GrayImage g = to_luma(random_image(32, 32, 3));
  const LbpParams params{8, 2};
  for (int code : lbp_codes(g, params)) {
    EXPECT_GE(code, 0);
    EXPECT_LE(code, 255);
  }
  EXPECT_NEAR(sum(compute_lbp(g, params)), 1.0, 1e-9);
  EXPECT_EQ(lbp_codes(to_luma(make_constant_image(16, 16, 9, 9, 9)), params).front(), 255);
}

TEST(Cld, ZigzagTwoByTwo) {
  EXPECT_EQ(zigzag_order(2), (std::vector<std::size_t>{0, 1, 2, 3}));
  const auto z8 = zigzag_order(8);
  EXPECT_EQ((std::vector<std::size_t>(z8.begin(), z8.begin() + 6)), (std::vector<std::size_t>{0, 1, 8, 16, 9, 2}));
  EXPECT_EQ(z8.back(), 63u);
}

TEST(Cld, ConstantGreyHasOnlyDcTerms) {
  const auto cld = compute_cld(make_constant_image(256, 256, 128, 128, 128));
  ASSERT_EQ(cld.size(), kCldDims);
  for (std::size_t i : {0u, 6u, 9u}) EXPECT_NE(cld[i], 0.0);
  for (std::size_t i : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 10u, 11u}) EXPECT_LT(std::abs(cld[i]), 1e-9) << i;
}

TEST(Cld, BlackWhiteHalvesMatchDirectDct) {
  const Image img = half_split(256, 256, 0, 255);
  const auto cld = compute_cld(img);
  const ColorLayoutGrid grid = color_layout_grid(img);
  const std::pair<int, int> zig[6] = {{0, 0}, {0, 1}, {1, 0}, {2, 0}, {1, 1}, {0, 2}};
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(cld[i], ref_dct(grid.y, zig[i].first, zig[i].second), 1e-9) << i;
  EXPECT_GT(std::abs(cld[1]), 1.0);   // first horizontal AC
  EXPECT_LT(std::abs(cld[2]), 1e-9);  // first vertical AC
}

TEST(Cld, DctRoundTrip) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-128, 255);
  std::vector<double> block(64);
  for (double& v : block) v = dist(rng);
  const auto back = idct2(dct2(block, 8), 8);
  for (int i = 0; i < 64; ++i) EXPECT_NEAR(back[i], block[i], 1e-6);
}

TEST(Cld, IndependentOfLosslessFormat) {
  const auto root = fixture::scratch_dir("cld_format");
  cv::Mat m(256, 256, CV_8UC3);
  cv::randu(m, 0, 255);
  cv::imwrite((root / "a.png").string(), m);
  cv::imwrite((root / "a.bmp").string(), m);
  EXPECT_EQ(compute_cld(load_and_resize(root / "a.png")), compute_cld(load_and_resize(root / "a.bmp")));
}

TEST(Cld, WeightedDistance) {
  std::vector<double> a(12, 0.0), b(12, 0.0);
  b[0] = 3;   // luma DC, weight 2
  b[6] = 1;   // Cb DC, weight 2
  b[10] = 2;  // Cr, weight 1
  EXPECT_NEAR(cld_distance(a, b), std::sqrt(2 * 9.0) + std::sqrt(2 * 1.0) + std::sqrt(1 * 4.0), 1e-12);
}

TEST(Eoh, ConstantImageIsUniform) {
  const auto eoh = compute_eoh(make_constant_image(64, 64, 1, 2, 3));
  ASSERT_EQ(eoh.size(), kEohDims);
  for (double v : eoh) EXPECT_DOUBLE_EQ(v, 0.2);
}

TEST(Eoh, VerticalStepEdge) {
  const auto eoh = compute_eoh(half_split(64, 64, 20, 220));
  EXPECT_GE(eoh[static_cast<int>(EdgeBin::Vertical)], 0.9);
  EXPECT_NEAR(sum(eoh), 1.0, 1e-12);
}

TEST(Eoh, HorizontalStepAndThreshold) {
  Image img(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y)[c] = y < 32 ? 20 : 220;
  EXPECT_GE(compute_eoh(img)[static_cast<int>(EdgeBin::Horizontal)], 0.9);
  // A step of 5 grey levels stays below the default threshold.
  for (double v : compute_eoh(half_split(64, 64, 100, 105))) EXPECT_DOUBLE_EQ(v, 0.2);
}

TEST(Eoh, BlockVariantDims) {
  const auto blocks = compute_eoh_blocks(to_luma(random_image(64, 64, 4)));
  EXPECT_EQ(blocks.size(), 80u);
  for (int b = 0; b < 16; ++b) {  // each block is its own distribution
    EXPECT_NEAR(std::accumulate(blocks.begin() + 5 * b, blocks.begin() + 5 * b + 5, 0.0), 1.0, 1e-9);
  }
}

TEST(ComputeAll, InvariantsAndDeterminism) {
  const Image img = random_image(256, 256, 8);
  const DescriptorSet a = compute_all(img);
  const DescriptorSet b = compute_all(img);
  EXPECT_TRUE(a.has_canonical_dims());
  EXPECT_EQ(a, b);
  for (const auto* h : {&a.cdh, &a.lbp, &a.eoh}) {
    EXPECT_NEAR(sum(*h), 1.0, 1e-9);
    for (double v : *h) EXPECT_GE(v, 0.0);
  }
  for (double v : a.cld) EXPECT_TRUE(std::isfinite(v));
}

TEST(ComputeAll, ConstantImageDegenerateOutputs) {
  const DescriptorSet s = compute_all(make_constant_image(256, 256, 50, 50, 50));
  EXPECT_DOUBLE_EQ(s.cdh[0], 1.0 / 108);
  EXPECT_EQ(s.lbp[255], 1.0);
  EXPECT_DOUBLE_EQ(s.eoh[4], 0.2);
  EXPECT_LT(std::abs(s.cld[1]), 1e-9);
}
