#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mammo/error.hpp"
#include "mammo/gaussian.hpp"
#include "mammo/image.hpp"

namespace mammo {

using Histogram = std::array<std::uint64_t, 256>;

inline Histogram histogram256(const GrayImage& img) {
  Histogram h{};
  for (double v : img.pixels()) ++h[static_cast<std::size_t>(quantize_value(v))];
  return h;
}

namespace detail {

// Exact comparison of a^2 / b against c^2 / d for a, c < 2^63 and b, d < 2^64,
// via 192-bit products. Returns -1, 0, or 1.
inline int compare_sq_ratio(unsigned __int128 a, unsigned __int128 b, unsigned __int128 c,
                            unsigned __int128 d) {
  using u128 = unsigned __int128;
  struct U192 {
    u128 hi;  // upper 64 bits live in the low half of hi
    u128 lo;
  };
  const auto mul = [](u128 x, u128 y) {  // x < 2^128, y < 2^64
    const u128 mask = ~static_cast<std::uint64_t>(0);
    const u128 xl = x & mask, xh = x >> 64;
    const u128 pl = xl * y;
    const u128 ph = xh * y + (pl >> 64);
    return U192{ph >> 64, (ph << 64) | (pl & mask)};
  };
  const U192 lhs = mul(a * a, d);
  const U192 rhs = mul(c * c, b);
  if (lhs.hi != rhs.hi) return lhs.hi < rhs.hi ? -1 : 1;
  if (lhs.lo != rhs.lo) return lhs.lo < rhs.lo ? -1 : 1;
  return 0;
}

}  // namespace detail

/// Otsu threshold over a 256-bin histogram: the t in [0, 254] maximizing the
/// between-class variance of {<= t} vs {> t}; ties go to the smallest t.
inline int otsu_threshold(const Histogram& hist) {
  std::uint64_t n = 0, s = 0;
  int nonzero_bins = 0;
  for (int i = 0; i < 256; ++i) {
    n += hist[i];
    s += hist[i] * static_cast<std::uint64_t>(i);
    nonzero_bins += hist[i] > 0;
  }
  if (nonzero_bins < 2) throw DegenerateHistogram("all pixels share one intensity");

  // sigma_b^2(t) = (S0*N - S*n0)^2 / (N^2 * n0 * n1); N^2 is common to all t.
  using i128 = __int128;
  int best_t = -1;
  unsigned __int128 best_num = 0, best_den = 1;
  std::uint64_t n0 = 0, s0 = 0;
  for (int t = 0; t <= 254; ++t) {
    n0 += hist[t];
    s0 += hist[t] * static_cast<std::uint64_t>(t);
    const std::uint64_t n1 = n - n0;
    if (n0 == 0 || n1 == 0) continue;
    const i128 diff = static_cast<i128>(s0) * n - static_cast<i128>(s) * n0;
    const auto num = static_cast<unsigned __int128>(diff < 0 ? -diff : diff);
    const auto den = static_cast<unsigned __int128>(n0) * n1;
    if (best_t < 0 || detail::compare_sq_ratio(num, den, best_num, best_den) > 0) {
      best_t = t;
      best_num = num;
      best_den = den;
    }
  }
  return best_t;
}

inline int otsu_threshold(const GrayImage& img) { return otsu_threshold(histogram256(img)); }

/// 1 where the quantized intensity is strictly greater than t.
inline BinaryMask binarize(const GrayImage& img, int t) {
  BinaryMask m(img.height(), img.width());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) m.set(r, c, quantize_value(img(r, c)) > t);
  }
  return m;
}

/// Smooth the mask as a {0, 255} image and re-binarize at half maximum.
inline BinaryMask mask_smooth(const BinaryMask& mask, double sigma) {
  const GrayImage smoothed = gaussian_smooth(mask_to_image(mask), sigma);
  BinaryMask out(mask.height(), mask.width());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) out.set(r, c, smoothed(r, c) > 127.5);
  }
  return out;
}

struct LabelMap {
  int height = 0;
  int width = 0;
  std::vector<int> labels;  // 0 = background, 1..region_count
  int region_count = 0;

  int operator()(int r, int c) const noexcept {
    return labels[static_cast<std::size_t>(r) * width + c];
  }
};

struct Pixel {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

struct BoundingBox {
  int min_row = 0;
  int min_col = 0;
  int max_row = 0;
  int max_col = 0;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Connected-component labeling; labels follow raster-scan first-encounter order.
inline LabelMap connected_components(const BinaryMask& mask, int connectivity = 8) {
  if (connectivity != 4 && connectivity != 8) throw InvalidConfig("connectivity must be 4 or 8");
  const int h = mask.height();
  const int w = mask.width();
  LabelMap lm{h, w, std::vector<int>(static_cast<std::size_t>(h) * w, 0), 0};
  static constexpr int kN4[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
  static constexpr int kN8[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                    {0, 1},   {1, -1}, {1, 0},  {1, 1}};
  std::vector<int> stack;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * w + c;
      if (!mask(r, c) || lm.labels[idx] != 0) continue;
      const int label = ++lm.region_count;
      lm.labels[idx] = label;
      stack.push_back(static_cast<int>(idx));
      while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        const int cr = cur / w;
        const int cc = cur % w;
        const auto visit = [&](int dr, int dc) {
          const int nr = cr + dr, nc = cc + dc;
          if (nr < 0 || nr >= h || nc < 0 || nc >= w || !mask(nr, nc)) return;
          const std::size_t ni = static_cast<std::size_t>(nr) * w + nc;
          if (lm.labels[ni] != 0) return;
          lm.labels[ni] = label;
          stack.push_back(static_cast<int>(ni));
        };
        if (connectivity == 4) {
          for (const auto& d : kN4) visit(d[0], d[1]);
        } else {
          for (const auto& d : kN8) visit(d[0], d[1]);
        }
      }
    }
  }
  return lm;
}

/// One connected component. Pixels are kept in raster order.
struct Region {
  int label = 0;
  std::vector<Pixel> pixels;
  BoundingBox bbox;

  std::size_t area() const noexcept { return pixels.size(); }

  /// Builds a region from an arbitrary pixel list (sorted, deduplicated).
  static Region from_pixels(std::vector<Pixel> px, int label = 1) {
    if (px.empty()) throw InvalidConfig("region must be non-empty");
    std::sort(px.begin(), px.end());
    px.erase(std::unique(px.begin(), px.end()), px.end());
    Region reg{label, std::move(px), {}};
    reg.bbox = {reg.pixels.front().row, reg.pixels.front().col, reg.pixels.front().row,
                reg.pixels.front().col};
    for (const auto& p : reg.pixels) {
      reg.bbox.min_row = std::min(reg.bbox.min_row, p.row);
      reg.bbox.max_row = std::max(reg.bbox.max_row, p.row);
      reg.bbox.min_col = std::min(reg.bbox.min_col, p.col);
      reg.bbox.max_col = std::max(reg.bbox.max_col, p.col);
    }
    return reg;
  }
};

/// Regions with at least min_area pixels, largest first, ties by label.
inline std::vector<Region> extract_regions(const LabelMap& lm, std::size_t min_area = 1) {
  std::vector<Region> all(lm.region_count);
  for (int i = 0; i < lm.region_count; ++i) all[i].label = i + 1;
  for (int r = 0; r < lm.height; ++r) {
    for (int c = 0; c < lm.width; ++c) {
      const int l = lm(r, c);
      if (l == 0) continue;
      Region& reg = all[l - 1];
      if (reg.pixels.empty()) {
        reg.bbox = {r, c, r, c};
      } else {
        reg.bbox.min_row = std::min(reg.bbox.min_row, r);
        reg.bbox.max_row = std::max(reg.bbox.max_row, r);
        reg.bbox.min_col = std::min(reg.bbox.min_col, c);
        reg.bbox.max_col = std::max(reg.bbox.max_col, c);
      }
      reg.pixels.push_back({r, c});
    }
  }
  std::vector<Region> kept;
  for (auto& reg : all) {
    if (!reg.pixels.empty() && reg.pixels.size() >= min_area) kept.push_back(std::move(reg));
  }
  std::stable_sort(kept.begin(), kept.end(), [](const Region& a, const Region& b) {
    if (a.area() != b.area()) return a.area() > b.area();
    return a.label < b.label;
  });
  return kept;
}

enum class ThresholdMode { otsu, fixed };

struct SegmentConfig {
  ThresholdMode threshold_mode = ThresholdMode::otsu;
  int fixed_threshold = 128;
  std::size_t min_area = 50;
  double mask_sigma = 1.5;
  int connectivity = 8;

  void validate() const {
    if (fixed_threshold < 0 || fixed_threshold > 255) {
      throw InvalidConfig("segment.fixed_threshold must be in [0, 255]");
    }
    if (!(mask_sigma > 0.0)) throw NonPositiveSigma("segment.mask_sigma must be > 0");
    if (connectivity != 4 && connectivity != 8) {
      throw InvalidConfig("segment.connectivity must be 4 or 8");
    }
  }

  friend bool operator==(const SegmentConfig&, const SegmentConfig&) = default;
};

struct SegmentResult {
  std::optional<int> threshold;  // empty when the histogram was degenerate
  BinaryMask mask;
  std::vector<Region> regions;
};

/// Threshold -> binarize -> mask smoothing -> labeling -> area filter.
/// A degenerate histogram (flat image) yields an empty result, not an error.
inline SegmentResult segment_detailed(const GrayImage& img, const SegmentConfig& cfg = {}) {
  cfg.validate();
  SegmentResult res;
  res.mask = BinaryMask(img.height(), img.width());
  int t = cfg.fixed_threshold;
  if (cfg.threshold_mode == ThresholdMode::otsu) {
    try {
      t = otsu_threshold(img);
    } catch (const DegenerateHistogram&) {
      return res;
    }
  }
  res.threshold = t;
  res.mask = mask_smooth(binarize(img, t), cfg.mask_sigma);
  res.regions = extract_regions(connected_components(res.mask, cfg.connectivity), cfg.min_area);
  return res;
}

inline std::vector<Region> segment(const GrayImage& img, const SegmentConfig& cfg = {}) {
  return segment_detailed(img, cfg).regions;
}

}  // namespace mammo
