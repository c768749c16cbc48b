#pragma once

// Shared fixtures and independent reference implementations for the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "cbir/descriptors.hpp"
#include "cbir/ingest.hpp"
#include "cbir/records.hpp"
#include "cbir/synthetic.hpp"

namespace cbir::fixture {

// Plain-loop metric oracles, written without reference to the library code.
inline double ref_canberra(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double den = std::fabs(a[i] + ma) + std::fabs(b[i] + mb);
    if (den != 0) d += std::fabs(a[i] - b[i]) / den;
  }
  return d;
}

inline double ref_chi_square(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double den = std::fabs(a[i] + b[i]) / 2;
    if (den != 0) d += (a[i] - b[i]) * (a[i] - b[i]) / den;
  }
  return d;
}

inline double ref_euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double ref_distance(int metric, const std::vector<double>& a, const std::vector<double>& b) {
  switch (metric) {
    case 0: return ref_canberra(a, b);
    case 1: return ref_chi_square(a, b);
    default: return ref_euclidean(a, b);
  }
}

inline const std::vector<double>& part(const DescriptorSet& s, int f) {
  return f == 0 ? s.cdh : f == 1 ? s.lbp : f == 2 ? s.cld : s.eoh;
}

// Exhaustive scan: every record except the query, min-max normalized per
// descriptor over that set, weighted sum, ordered by (distance, id).
inline std::vector<std::uint32_t> brute_force_top(const std::vector<FeatureRecord>& records, std::uint32_t query,
                                                  int metric, const std::array<double, 4>& weights,
                                                  std::size_t n) {
  double total = weights[0] + weights[1] + weights[2] + weights[3];
  std::vector<std::uint32_t> ids;
  for (const auto& r : records)
    if (r.id != query) ids.push_back(r.id);
  std::vector<std::array<double, 4>> raw(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (int f = 0; f < 4; ++f)
      raw[i][f] = ref_distance(metric, part(records[query].descriptors, f), part(records[ids[i]].descriptors, f));
  std::vector<double> combined(ids.size(), 0.0);
  for (int f = 0; f < 4; ++f) {
    double lo = raw[0][f], hi = raw[0][f];
    for (const auto& r : raw) {
      lo = std::min(lo, r[f]);
      hi = std::max(hi, r[f]);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const double norm = hi > lo ? (raw[i][f] - lo) / (hi - lo) : 0.0;
      combined[i] += weights[f] / total * norm;
    }
  }
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return combined[a] != combined[b] ? combined[a] < combined[b] : ids[a] < ids[b];
  });
  std::vector<std::uint32_t> top;
  for (std::size_t i = 0; i < std::min(n, order.size()); ++i) top.push_back(ids[order[i]]);
  return top;
}

// Reference bilinear resampler with half-pixel centres and edge clamping.
inline Image ref_bilinear(const Image& src, int w, int h) {
  Image out(w, h);
  const double sx = static_cast<double>(src.width) / w, sy = static_cast<double>(src.height) / h;
  for (int y = 0; y < h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(src.height - 1));
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double ty = fy - y0;
    for (int x = 0; x < w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      fx = std::clamp(fx, 0.0, static_cast<double>(src.width - 1));
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, src.width - 1);
      const double tx = fx - x0;
      for (int c = 0; c < 3; ++c) {
        const double v = (1 - ty) * ((1 - tx) * src.at(x0, y0)[c] + tx * src.at(x1, y0)[c]) +
                         ty * ((1 - tx) * src.at(x0, y1)[c] + tx * src.at(x1, y1)[c]);
        out.at(x, y)[c] = static_cast<std::uint8_t>(std::lround(v));
      }
    }
  }
  return out;
}

// Records whose four descriptors sit in disjoint, class-specific regions, so
// every descriptor alone separates the classes.
inline std::vector<FeatureRecord> separable_records(std::size_t classes, std::size_t per_class,
                                                    std::uint64_t seed = 3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(0.0, 0.02);
  std::vector<FeatureRecord> records;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      FeatureRecord r;
      r.id = static_cast<std::uint32_t>(records.size());
      r.label = "class" + std::to_string(c);
      r.path = r.label + "/" + std::to_string(i) + ".png";
      for (Descriptor d : kAllDescriptors) {
        std::vector<double> v(descriptor_dims(d));
        for (double& x : v) x = noise(rng);
        const std::size_t stride = v.size() / classes;
        for (std::size_t k = 0; k < std::max<std::size_t>(stride, 1); ++k) v[(c * stride + k) % v.size()] += 1.0;
        if (d == Descriptor::Cld) {
          for (double& x : v) x *= 10;
        } else {
          l1_normalize_or_uniform(v);
        }
        r.descriptors.get(d) = std::move(v);
      }
      records.push_back(std::move(r));
    }
  }
  return records;
}

// Descriptor records for the generated synthetic corpus (held in memory).
inline const std::vector<FeatureRecord>& synthetic_records() {
  static const std::vector<FeatureRecord> records = [] {
    std::vector<FeatureRecord> out;
    for (const auto& img : generate_synthetic_images(SyntheticSpec{})) {
      FeatureRecord r;
      r.id = static_cast<std::uint32_t>(out.size());
      r.label = img.label;
      r.path = img.label + "/" + std::to_string(r.id) + ".png";
      r.descriptors = compute_all(img.image);
      out.push_back(std::move(r));
    }
    return out;
  }();
  return records;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("cbir_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace cbir::fixture
