#include "cbir/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <system_error>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "cbir/error.hpp"
#include "random.hpp"

namespace fs = std::filesystem;

namespace cbir {

namespace {

constexpr const char* kFactorNames[] = {"hue", "texture", "layout", "edges"};

// 2x2 bright/dark quadrant patterns (bit q set = quadrant q bright), minus the
// two uniform ones. The first four are reserved as class targets.
constexpr std::array<int, 14> kLayouts = {0b1001, 0b0110, 0b0011, 0b1100, 0b0101, 0b1010, 0b0001,
                                          0b0010, 0b0100, 0b1000, 0b1110, 0b1101, 0b1011, 0b0111};
constexpr std::size_t kReservedLayouts = 4;

struct Factors {
  double hue = 0;          // degrees
  double saturation = 0;   // [0, 1]
  double period = 12;      // pixels
  double orientation = 0;  // degrees
  double phase = 0;
  int layout = 0b0101;
};

std::array<double, 3> hsv_to_rgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = std::fmod(h, 360.0) / 60.0;
  const double x = c * (1 - std::abs(std::fmod(hp, 2.0) - 1));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const double m = v - c;
  return {r + m, g + m, b + m};
}

Factors draw_factors(std::size_t class_index, std::mt19937_64& rng) {
  using detail::uniform_real;
  const std::size_t factor = class_index % 4;
  const std::size_t variant = class_index / 4;

  Factors f;
  f.hue = uniform_real(rng, 0.0, 360.0);
  f.saturation = uniform_real(rng, 0.0, 0.3);
  f.period = uniform_real(rng, 9.0, 28.0);
  // Neutral orientations stay clear of the 45 and 135 degree targets.
  const double pick = uniform_real(rng, 0.0, 100.0);
  f.orientation = pick < 25 ? pick : (pick < 75 ? 65 + (pick - 25) : 155 + (pick - 75));
  f.phase = uniform_real(rng, 0.0, 2 * std::numbers::pi);
  f.layout = kLayouts[kReservedLayouts + detail::uniform_index(rng, kLayouts.size() - kReservedLayouts)];

  switch (factor) {
    case 0:
      f.hue = std::fmod(220.0 + 90.0 * variant + uniform_real(rng, -8.0, 8.0), 360.0);
      f.saturation = uniform_real(rng, 0.75, 0.95);
      break;
    case 1:
      f.period = 3.0 + 1.5 * static_cast<double>(variant % 4) + uniform_real(rng, -0.2, 0.2);
      break;
    case 2:
      f.layout = kLayouts[variant % kReservedLayouts];
      break;
    default:
      f.orientation = (variant % 2 == 0 ? 45.0 : 135.0) + uniform_real(rng, -4.0, 4.0);
      break;
  }
  return f;
}

Image render(const Factors& f, std::mt19937_64& rng) {
  constexpr int n = kCanonicalSize;
  constexpr double amplitude = 0.18;
  Image image(n, n);
  const double theta = f.orientation * std::numbers::pi / 180.0;
  const double kx = std::cos(theta) * 2 * std::numbers::pi / f.period;
  const double ky = std::sin(theta) * 2 * std::numbers::pi / f.period;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const int quadrant = (y >= n / 2 ? 2 : 0) + (x >= n / 2 ? 1 : 0);
      const double base = (f.layout >> quadrant) & 1 ? 0.72 : 0.34;
      const double value = std::clamp(base + amplitude * std::sin(kx * x + ky * y + f.phase), 0.0, 1.0);
      const auto rgb = hsv_to_rgb(f.hue, f.saturation, value);
      std::uint8_t* p = image.at(x, y);
      for (int c = 0; c < 3; ++c) {
        const double noise = detail::uniform_real(rng, -3.0, 3.0);
        p[c] = static_cast<std::uint8_t>(std::clamp(std::lround(rgb[c] * 255.0 + noise), 0L, 255L));
      }
    }
  }
  return image;
}

}  // namespace

std::string synthetic_class_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "c%02zu_%s", index, kFactorNames[index % 4]);
  return buf;
}

std::vector<SyntheticImage> generate_synthetic_images(const SyntheticSpec& spec) {
  if (spec.classes < 1 || spec.per_class < 1) {
    throw Error(ErrorCode::InvalidArgument, "synthetic corpus needs at least one class and one image");
  }
  std::vector<SyntheticImage> out;
  out.reserve(spec.classes * spec.per_class);
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      std::mt19937_64 rng(detail::mix_seed(spec.seed, c * 100003 + i));
      const Factors f = draw_factors(c, rng);
      out.push_back({synthetic_class_name(c), render(f, rng)});
    }
  }
  return out;
}

std::vector<fs::path> write_synthetic_corpus(const SyntheticSpec& spec, const fs::path& root) {
  std::vector<fs::path> written;
  std::size_t index = 0;
  for (const auto& item : generate_synthetic_images(spec)) {
    const fs::path dir = root / item.label;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    char name[32];
    std::snprintf(name, sizeof name, "%03zu.png", index++ % spec.per_class);
    const fs::path path = dir / name;
    cv::Mat rgb(item.image.height, item.image.width, CV_8UC3, const_cast<std::uint8_t*>(item.image.rgb.data()));
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    if (!cv::imwrite(path.string(), bgr)) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

SyntheticSpec parse_synthetic_spec(const std::vector<std::string>& tokens) {
  SyntheticSpec spec;
  for (const auto& token : tokens) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq), value = token.substr(eq + 1);
    std::size_t used = 0;
    unsigned long long parsed = 0;
    try {
      parsed = std::stoull(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw Error(ErrorCode::InvalidArgument, "bad value in '" + token + "'");
    if (key == "classes") spec.classes = parsed;
    else if (key == "per-class" || key == "per_class") spec.per_class = parsed;
    else if (key == "seed") spec.seed = parsed;
    else throw Error(ErrorCode::InvalidArgument, "unknown synthetic option '" + key + "'");
  }
  return spec;
}

}  // namespace cbir
