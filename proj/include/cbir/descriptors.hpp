#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "cbir/image.hpp"

namespace cbir {

// Color difference histogram layout.
inline constexpr int kCdhLightnessLevels = 10;
inline constexpr int kCdhChromaLevels = 3;  // for each of a* and b*
inline constexpr int kCdhColorBins = kCdhLightnessLevels * kCdhChromaLevels * kCdhChromaLevels;
inline constexpr int kCdhOrientationBins = 18;
inline constexpr double kCdhChromaThreshold = 25.0;  // a*/b* split at -25 / +25

inline constexpr std::size_t kCdhDims = kCdhColorBins + kCdhOrientationBins;  // 108
inline constexpr std::size_t kLbpDims = 256;
inline constexpr std::size_t kCldLumaCoeffs = 6;
inline constexpr std::size_t kCldChromaCoeffs = 3;
inline constexpr std::size_t kCldDims = kCldLumaCoeffs + 2 * kCldChromaCoeffs;  // 12
inline constexpr std::size_t kEohDims = 5;
inline constexpr std::size_t kFeatureDims = kCdhDims + kLbpDims + kCldDims + kEohDims;  // 381

inline constexpr double kDefaultEohThreshold = 11.0;

enum class Descriptor { Cdh = 0, Lbp = 1, Cld = 2, Eoh = 3 };
inline constexpr std::size_t kDescriptorCount = 4;
inline constexpr std::array<Descriptor, kDescriptorCount> kAllDescriptors = {
    Descriptor::Cdh, Descriptor::Lbp, Descriptor::Cld, Descriptor::Eoh};

std::string_view descriptor_name(Descriptor d);  // "CDH", "LBP", ...
std::size_t descriptor_dims(Descriptor d);

struct DescriptorSet {
  std::vector<double> cdh;
  std::vector<double> lbp;
  std::vector<double> cld;
  std::vector<double> eoh;

  const std::vector<double>& get(Descriptor d) const;
  std::vector<double>& get(Descriptor d);

  bool has_canonical_dims() const;
  bool operator==(const DescriptorSet&) const = default;
};

struct LbpParams {
  int neighbors = 8;
  int radius = 1;

  bool operator==(const LbpParams&) const = default;
};

/// EOH bin order.
enum class EdgeBin { Vertical = 0, Horizontal = 1, Diagonal45 = 2, Diagonal135 = 3, NonDirectional = 4 };

/// Weights of the per-channel CLD distance.
struct CldWeights {
  std::array<double, kCldLumaCoeffs> luma = {2, 2, 2, 1, 1, 1};
  std::array<double, kCldChromaCoeffs> cb = {2, 1, 1};
  std::array<double, kCldChromaCoeffs> cr = {2, 1, 1};

  bool operator==(const CldWeights&) const = default;
};

struct DescriptorConfig {
  LbpParams lbp;
  double eoh_threshold = kDefaultEohThreshold;
  bool eoh_block_based = false;  // 4x4 blocks x 5 bins when enabled (80 dims)
  CldWeights cld_weights;
};

// --- CDH ---------------------------------------------------------------

struct Lab {
  double l = 0;
  double a = 0;
  double b = 0;
};

/// sRGB (D65) -> CIE L*a*b*.
Lab srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Index in [0, 90) of the quantized L*a*b* color.
int quantize_lab(const Lab& lab);

/// Index in [0, 18) of a gradient angle in degrees (any real angle).
int quantize_orientation(double degrees);

std::vector<double> compute_cdh(const Image& image);

// --- LBP ---------------------------------------------------------------

/// Per-pixel codes for interior pixels (border of `radius` is skipped);
/// row-major over the interior region.
std::vector<int> lbp_codes(const GrayImage& gray, const LbpParams& params = {});
std::vector<double> compute_lbp(const GrayImage& gray, const LbpParams& params = {});
std::vector<double> compute_lbp(const Image& image, const LbpParams& params = {});

// --- CLD ---------------------------------------------------------------

/// JPEG-style zigzag traversal of an n x n matrix, as flat row-major indices.
std::vector<std::size_t> zigzag_order(std::size_t n);

/// Orthonormal 2-D DCT-II of an n x n row-major block, and its inverse.
std::vector<double> dct2(std::span<const double> block, std::size_t n);
std::vector<double> idct2(std::span<const double> coeffs, std::size_t n);

struct ColorLayoutGrid {
  std::array<double, 64> y{};
  std::array<double, 64> cb{};
  std::array<double, 64> cr{};
};

/// Mean color of each of the 8x8 blocks, in BT.601 YCbCr.
ColorLayoutGrid color_layout_grid(const Image& image);

std::vector<double> compute_cld(const Image& image);

/// Channel-weighted CLD distance: sum over channels of sqrt(sum_i w_i (q_i - t_i)^2).
double cld_distance(std::span<const double> query, std::span<const double> target,
                    const CldWeights& weights = {});

// --- EOH ---------------------------------------------------------------

/// Index of the winning mask at interior pixel (x, y), or -1 when the
/// strongest normalized response is below `threshold`.
int dominant_edge(const GrayImage& gray, int x, int y, double threshold);

std::vector<double> compute_eoh(const GrayImage& gray, double threshold = kDefaultEohThreshold);
std::vector<double> compute_eoh(const Image& image, double threshold = kDefaultEohThreshold);
/// 4x4 grid of local 5-bin histograms, each L1-normalized, concatenated.
std::vector<double> compute_eoh_blocks(const GrayImage& gray, double threshold = kDefaultEohThreshold);

DescriptorSet compute_all(const Image& image, const DescriptorConfig& config = {});

/// Divides by the L1 norm; a zero-mass histogram becomes uniform.
void l1_normalize_or_uniform(std::vector<double>& histogram);

}  // namespace cbir
