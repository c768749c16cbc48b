#include "cbir/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cbir/error.hpp"

namespace cbir {

std::string_view descriptor_name(Descriptor d) {
  switch (d) {
    case Descriptor::Cdh: return "CDH";
    case Descriptor::Lbp: return "LBP";
    case Descriptor::Cld: return "CLD";
    case Descriptor::Eoh: return "EOH";
  }
  return "?";
}

std::size_t descriptor_dims(Descriptor d) {
  switch (d) {
    case Descriptor::Cdh: return kCdhDims;
    case Descriptor::Lbp: return kLbpDims;
    case Descriptor::Cld: return kCldDims;
    case Descriptor::Eoh: return kEohDims;
  }
  return 0;
}

const std::vector<double>& DescriptorSet::get(Descriptor d) const {
  switch (d) {
    case Descriptor::Cdh: return cdh;
    case Descriptor::Lbp: return lbp;
    case Descriptor::Cld: return cld;
    case Descriptor::Eoh: break;
  }
  return eoh;
}

std::vector<double>& DescriptorSet::get(Descriptor d) {
  return const_cast<std::vector<double>&>(std::as_const(*this).get(d));
}

bool DescriptorSet::has_canonical_dims() const {
  return std::all_of(kAllDescriptors.begin(), kAllDescriptors.end(),
                     [&](Descriptor d) { return get(d).size() == descriptor_dims(d); });
}

void l1_normalize_or_uniform(std::vector<double>& histogram) {
  if (histogram.empty()) return;
  const double total = std::accumulate(histogram.begin(), histogram.end(), 0.0);
  if (total > 0.0) {
    for (double& v : histogram) v /= total;
  } else {
    std::fill(histogram.begin(), histogram.end(), 1.0 / static_cast<double>(histogram.size()));
  }
}

// ---------------------------------------------------------------------------
// CDH

namespace {

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

const std::array<double, 256>& linear_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) t[i] = srgb_to_linear(i / 255.0);
    return t;
  }();
  return table;
}

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

// 3x3 Sobel on an arbitrary channel accessor; gy grows downwards.
template <typename Sample>
std::pair<double, double> sobel(const Sample& s, int x, int y) {
  const double gx = (s(x + 1, y - 1) + 2 * s(x + 1, y) + s(x + 1, y + 1)) -
                    (s(x - 1, y - 1) + 2 * s(x - 1, y) + s(x - 1, y + 1));
  const double gy = (s(x - 1, y + 1) + 2 * s(x, y + 1) + s(x + 1, y + 1)) -
                    (s(x - 1, y - 1) + 2 * s(x, y - 1) + s(x + 1, y - 1));
  return {gx, gy};
}

}  // namespace

Lab srgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const auto& lin = linear_table();
  const double r = lin[r8], g = lin[g8], b = lin[b8];
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = lab_f(x / 0.95047);
  const double fy = lab_f(y / 1.0);
  const double fz = lab_f(z / 1.08883);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

int quantize_lab(const Lab& lab) {
  const int l = std::clamp(static_cast<int>(std::floor(lab.l / 10.0)), 0, kCdhLightnessLevels - 1);
  auto chroma = [](double v) { return v < -kCdhChromaThreshold ? 0 : (v < kCdhChromaThreshold ? 1 : 2); };
  return (l * kCdhChromaLevels + chroma(lab.a)) * kCdhChromaLevels + chroma(lab.b);
}

int quantize_orientation(double degrees) {
  double wrapped = std::fmod(degrees, 360.0);
  if (wrapped < 0) wrapped += 360.0;
  return std::min(static_cast<int>(wrapped / 20.0), kCdhOrientationBins - 1);
}

std::vector<double> compute_cdh(const Image& image) {
  std::vector<double> hist(kCdhDims, 0.0);
  const int w = image.width, h = image.height;
  if (w < 3 || h < 3) {
    l1_normalize_or_uniform(hist);
    return hist;
  }

  std::vector<Lab> lab(static_cast<std::size_t>(w) * h);
  std::vector<int> color(lab.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t* p = image.at(x, y);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      lab[i] = srgb_to_lab(p[0], p[1], p[2]);
      color[i] = quantize_lab(lab[i]);
    }
  }

  auto lightness = [&](int x, int y) { return lab[static_cast<std::size_t>(y) * w + x].l; };
  std::vector<int> orientation(lab.size(), -1);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const auto [gx, gy] = sobel(lightness, x, y);
      const double degrees = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      orientation[static_cast<std::size_t>(y) * w + x] = quantize_orientation(degrees);
    }
  }

  auto accumulate_pair = [&](std::size_t i, std::size_t j) {
    const double dl = lab[i].l - lab[j].l, da = lab[i].a - lab[j].a, db = lab[i].b - lab[j].b;
    const double diff = std::sqrt(dl * dl + da * da + db * db);
    if (color[i] == color[j]) hist[color[i]] += diff;
    if (orientation[i] == orientation[j]) hist[kCdhColorBins + orientation[i]] += diff;
  };

  // Interior pixels only, each 4-neighbour pair once (right and down).
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w - 1) accumulate_pair(i, i + 1);
      if (y + 1 < h - 1) accumulate_pair(i, i + w);
    }
  }
  l1_normalize_or_uniform(hist);
  return hist;
}

// ---------------------------------------------------------------------------
// LBP

namespace {

struct Offset {
  double dx;
  double dy;
};

std::vector<Offset> lbp_offsets(const LbpParams& params) {
  if (params.neighbors < 1 || params.neighbors > 16 || params.radius < 1) {
    throw Error(ErrorCode::InvalidArgument, "LBP needs 1 <= P <= 16 and R >= 1");
  }
  // Basic operator: the 3x3 ring, bit p at angle 45p degrees (E, NE, N, ...).
  if (params.neighbors == 8 && params.radius == 1) {
    return {{1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  }
  std::vector<Offset> offsets;
  for (int p = 0; p < params.neighbors; ++p) {
    const double angle = 2.0 * std::numbers::pi * p / params.neighbors;
    double dx = params.radius * std::cos(angle);
    double dy = -params.radius * std::sin(angle);
    if (std::abs(dx - std::round(dx)) < 1e-9) dx = std::round(dx);
    if (std::abs(dy - std::round(dy)) < 1e-9) dy = std::round(dy);
    offsets.push_back({dx, dy});
  }
  return offsets;
}

// Interpolates (g - center) rather than g so that flat regions give exact zeros.
double neighbour_difference(const GrayImage& gray, int x, int y, const Offset& o) {
  const double center = gray.at(x, y);
  const double sx = x + o.dx, sy = y + o.dy;
  const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
  const double fx = sx - x0, fy = sy - y0;
  if (fx == 0.0 && fy == 0.0) return gray.at(x0, y0) - center;
  const int x1 = std::min(x0 + 1, gray.width - 1), y1 = std::min(y0 + 1, gray.height - 1);
  return (1 - fx) * (1 - fy) * (gray.at(x0, y0) - center) + fx * (1 - fy) * (gray.at(x1, y0) - center) +
         (1 - fx) * fy * (gray.at(x0, y1) - center) + fx * fy * (gray.at(x1, y1) - center);
}

}  // namespace

std::vector<int> lbp_codes(const GrayImage& gray, const LbpParams& params) {
  const std::vector<Offset> offsets = lbp_offsets(params);
  const int r = params.radius;
  std::vector<int> codes;
  if (gray.width <= 2 * r || gray.height <= 2 * r) return codes;
  codes.reserve(static_cast<std::size_t>(gray.width - 2 * r) * (gray.height - 2 * r));
  for (int y = r; y < gray.height - r; ++y) {
    for (int x = r; x < gray.width - r; ++x) {
      int code = 0;
      for (std::size_t p = 0; p < offsets.size(); ++p) {
        if (neighbour_difference(gray, x, y, offsets[p]) >= 0.0) code |= 1 << p;
      }
      codes.push_back(code);
    }
  }
  return codes;
}

std::vector<double> compute_lbp(const GrayImage& gray, const LbpParams& params) {
  std::vector<double> hist(std::size_t{1} << params.neighbors, 0.0);
  for (int code : lbp_codes(gray, params)) hist[code] += 1.0;
  l1_normalize_or_uniform(hist);
  return hist;
}

std::vector<double> compute_lbp(const Image& image, const LbpParams& params) {
  return compute_lbp(to_luma(image), params);
}

// ---------------------------------------------------------------------------
// CLD

std::vector<std::size_t> zigzag_order(std::size_t n) {
  std::vector<std::size_t> order;
  order.reserve(n * n);
  for (std::size_t s = 0; s + 1 < 2 * n; ++s) {
    const std::size_t lo = s < n ? 0 : s - n + 1;
    const std::size_t hi = s < n ? s : n - 1;
    if (s % 2 == 0) {
      for (std::size_t row = hi + 1; row-- > lo;) order.push_back(row * n + (s - row));
    } else {
      for (std::size_t row = lo; row <= hi; ++row) order.push_back(row * n + (s - row));
    }
  }
  return order;
}

namespace {

std::vector<double> dct_basis(std::size_t n) {
  // basis[u * n + x] = alpha(u) cos((2x + 1) u pi / 2n)
  std::vector<double> basis(n * n);
  for (std::size_t u = 0; u < n; ++u) {
    const double alpha = u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t x = 0; x < n; ++x) {
      basis[u * n + x] = alpha * std::cos((2.0 * x + 1.0) * u * std::numbers::pi / (2.0 * n));
    }
  }
  return basis;
}

}  // namespace

std::vector<double> dct2(std::span<const double> block, std::size_t n) {
  if (block.size() != n * n) throw Error(ErrorCode::LengthMismatch, "dct2 expects an n x n block");
  const std::vector<double> basis = dct_basis(n);
  std::vector<double> rows(n * n, 0.0), out(n * n, 0.0);
  // Transform along columns of each row, then along rows.
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t c = 0; c < n; ++c) rows[r * n + v] += basis[v * n + c] * block[r * n + c];
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t r = 0; r < n; ++r) out[u * n + v] += basis[u * n + r] * rows[r * n + v];
  return out;
}

std::vector<double> idct2(std::span<const double> coeffs, std::size_t n) {
  if (coeffs.size() != n * n) throw Error(ErrorCode::LengthMismatch, "idct2 expects an n x n block");
  const std::vector<double> basis = dct_basis(n);
  std::vector<double> rows(n * n, 0.0), out(n * n, 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t v = 0; v < n; ++v) rows[u * n + c] += basis[v * n + c] * coeffs[u * n + v];
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t u = 0; u < n; ++u) out[r * n + c] += basis[u * n + r] * rows[u * n + c];
  return out;
}

ColorLayoutGrid color_layout_grid(const Image& image) {
  if (image.empty()) throw Error(ErrorCode::InvalidArgument, "empty image");
  ColorLayoutGrid grid;
  for (int by = 0; by < 8; ++by) {
    const int y0 = by * image.height / 8;
    const int y1 = std::max(y0 + 1, (by + 1) * image.height / 8);
    for (int bx = 0; bx < 8; ++bx) {
      const int x0 = bx * image.width / 8;
      const int x1 = std::max(x0 + 1, (bx + 1) * image.width / 8);
      double sum[3] = {0, 0, 0};
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
          for (int c = 0; c < 3; ++c) sum[c] += image.at(x, y)[c];
      const double count = static_cast<double>(x1 - x0) * (y1 - y0);
      const double r = sum[0] / count, g = sum[1] / count, b = sum[2] / count;
      const std::size_t i = static_cast<std::size_t>(by) * 8 + bx;
      grid.y[i] = 0.299 * r + 0.587 * g + 0.114 * b;
      grid.cb[i] = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
      grid.cr[i] = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
    }
  }
  return grid;
}

std::vector<double> compute_cld(const Image& image) {
  const ColorLayoutGrid grid = color_layout_grid(image);
  static const std::vector<std::size_t> zigzag = zigzag_order(8);
  std::vector<double> out;
  out.reserve(kCldDims);
  auto take = [&](const std::array<double, 64>& channel, std::size_t count) {
    const std::vector<double> coeffs = dct2(channel, 8);
    for (std::size_t i = 0; i < count; ++i) out.push_back(coeffs[zigzag[i]]);
  };
  take(grid.y, kCldLumaCoeffs);
  take(grid.cb, kCldChromaCoeffs);
  take(grid.cr, kCldChromaCoeffs);
  return out;
}

double cld_distance(std::span<const double> query, std::span<const double> target, const CldWeights& weights) {
  if (query.size() != kCldDims || target.size() != kCldDims) {
    throw Error(ErrorCode::LengthMismatch, "CLD vectors must have 12 coefficients");
  }
  auto channel = [&](std::size_t offset, std::span<const double> w) {
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double d = query[offset + i] - target[offset + i];
      sum += w[i] * d * d;
    }
    return std::sqrt(sum);
  };
  return channel(0, weights.luma) + channel(kCldLumaCoeffs, weights.cb) +
         channel(kCldLumaCoeffs + kCldChromaCoeffs, weights.cr);
}

// ---------------------------------------------------------------------------
// EOH

namespace {

struct EdgeMask {
  std::array<double, 9> k;
  double scale;  // sum of positive coefficients, maps a full 0..255 step to 255
};

// Row-major 3x3 kernels in EdgeBin order.
const std::array<EdgeMask, kEohDims>& edge_masks() {
  static const std::array<EdgeMask, kEohDims> masks = {{
      {{-1, 0, 1, -2, 0, 2, -1, 0, 1}, 4.0},          // vertical edge
      {{-1, -2, -1, 0, 0, 0, 1, 2, 1}, 4.0},          // horizontal edge
      {{0, 1, 2, -1, 0, 1, -2, -1, 0}, 4.0},          // 45 degrees
      {{-2, -1, 0, -1, 0, 1, 0, 1, 2}, 4.0},          // 135 degrees
      {{-1, -1, -1, -1, 8, -1, -1, -1, -1}, 8.0},     // non-directional
  }};
  return masks;
}

}  // namespace

int dominant_edge(const GrayImage& gray, int x, int y, double threshold) {
  int best = -1;
  double best_response = -1.0;
  const auto& masks = edge_masks();
  for (std::size_t m = 0; m < masks.size(); ++m) {
    double acc = 0.0;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) acc += masks[m].k[(dy + 1) * 3 + (dx + 1)] * gray.at(x + dx, y + dy);
    const double response = std::abs(acc) / masks[m].scale;
    if (response > best_response) {
      best_response = response;
      best = static_cast<int>(m);
    }
  }
  return best_response < threshold ? -1 : best;
}

std::vector<double> compute_eoh(const GrayImage& gray, double threshold) {
  std::vector<double> hist(kEohDims, 0.0);
  for (int y = 1; y < gray.height - 1; ++y) {
    for (int x = 1; x < gray.width - 1; ++x) {
      const int bin = dominant_edge(gray, x, y, threshold);
      if (bin >= 0) hist[bin] += 1.0;
    }
  }
  l1_normalize_or_uniform(hist);
  return hist;
}

std::vector<double> compute_eoh(const Image& image, double threshold) {
  return compute_eoh(to_luma(image), threshold);
}

std::vector<double> compute_eoh_blocks(const GrayImage& gray, double threshold) {
  constexpr int grid = 4;
  std::vector<double> out;
  out.reserve(grid * grid * kEohDims);
  for (int by = 0; by < grid; ++by) {
    for (int bx = 0; bx < grid; ++bx) {
      std::vector<double> hist(kEohDims, 0.0);
      const int y0 = std::max(1, by * gray.height / grid), y1 = std::min(gray.height - 1, (by + 1) * gray.height / grid);
      const int x0 = std::max(1, bx * gray.width / grid), x1 = std::min(gray.width - 1, (bx + 1) * gray.width / grid);
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
          const int bin = dominant_edge(gray, x, y, threshold);
          if (bin >= 0) hist[bin] += 1.0;
        }
      l1_normalize_or_uniform(hist);
      out.insert(out.end(), hist.begin(), hist.end());
    }
  }
  return out;
}

DescriptorSet compute_all(const Image& image, const DescriptorConfig& config) {
  if (image.empty() || image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw Error(ErrorCode::InvalidArgument, "malformed RGB image");
  }
  const GrayImage luma = to_luma(image);
  DescriptorSet set;
  set.cdh = compute_cdh(image);
  set.lbp = compute_lbp(luma, config.lbp);
  set.cld = compute_cld(image);
  set.eoh = config.eoh_block_based ? compute_eoh_blocks(luma, config.eoh_threshold)
                                   : compute_eoh(luma, config.eoh_threshold);
  return set;
}

}  // namespace cbir
