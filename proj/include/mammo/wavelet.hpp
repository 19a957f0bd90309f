#pragma once

// Separable orthonormal Haar DWT.
//
// One analysis level: pad odd dimensions by replicating the last row/column,
// transform every row pairwise (low = (a+b)/sqrt2, high = (a-b)/sqrt2), then
// every column of the result. Subband naming follows the 2x2 block
// [[a, b], [c, d]]:
//   LL = (a+b+c+d)/2   LH = (a-b+c-d)/2   HL = (a+b-c-d)/2   HH = (a-b-c+d)/2
// i.e. LH holds horizontal differences (row high-pass, column low-pass).

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mammo/error.hpp"
#include "mammo/image.hpp"

namespace mammo {

struct DetailBands {
  GrayImage lh;  // horizontal
  GrayImage hl;  // vertical
  GrayImage hh;  // diagonal
};

struct WaveletPyramid {
  GrayImage ll;                      // coarsest approximation
  std::vector<DetailBands> details;  // details[0] is the finest level
  int original_height = 0;
  int original_width = 0;

  int levels() const noexcept { return static_cast<int>(details.size()); }
};

namespace detail {

inline int half_up(int n) noexcept { return (n + 1) / 2; }

// Input dimension at analysis level k (k = 0 is the original image).
inline int level_dim(int original, int k) noexcept {
  int d = original;
  for (int i = 0; i < k; ++i) d = half_up(d);
  return d;
}

struct LevelBands {
  GrayImage ll;
  DetailBands d;
};

inline LevelBands haar_analyze(const GrayImage& img) {
  constexpr double s = 1.0 / std::numbers::sqrt2;
  const int h = img.height();
  const int w = img.width();
  const int hh = half_up(h);
  const int hw = half_up(w);
  const auto at = [&](int r, int c) { return img(std::min(r, h - 1), std::min(c, w - 1)); };

  // Row pass: low/high halves, each (2*hh) x hw, rows padded by replication.
  GrayImage lo(2 * hh, hw), hi(2 * hh, hw);
  for (int r = 0; r < 2 * hh; ++r) {
    for (int c = 0; c < hw; ++c) {
      const double a = at(r, 2 * c);
      const double b = at(r, 2 * c + 1);
      lo(r, c) = (a + b) * s;
      hi(r, c) = (a - b) * s;
    }
  }
  LevelBands out{GrayImage(hh, hw), {GrayImage(hh, hw), GrayImage(hh, hw), GrayImage(hh, hw)}};
  for (int r = 0; r < hh; ++r) {
    for (int c = 0; c < hw; ++c) {
      const double la = lo(2 * r, c), lb = lo(2 * r + 1, c);
      const double ha = hi(2 * r, c), hb = hi(2 * r + 1, c);
      out.ll(r, c) = (la + lb) * s;
      out.d.hl(r, c) = (la - lb) * s;
      out.d.lh(r, c) = (ha + hb) * s;
      out.d.hh(r, c) = (ha - hb) * s;
    }
  }
  return out;
}

// Inverse of one level, cropped to (h, w).
inline GrayImage haar_synthesize(const GrayImage& ll, const DetailBands& d, int h, int w) {
  constexpr double s = 1.0 / std::numbers::sqrt2;
  const int hh = ll.height();
  const int hw = ll.width();
  GrayImage out(h, w);
  for (int r = 0; r < hh; ++r) {
    for (int c = 0; c < hw; ++c) {
      const double lo_a = (ll(r, c) + d.hl(r, c)) * s;
      const double lo_b = (ll(r, c) - d.hl(r, c)) * s;
      const double hi_a = (d.lh(r, c) + d.hh(r, c)) * s;
      const double hi_b = (d.lh(r, c) - d.hh(r, c)) * s;
      const double v[2][2] = {{(lo_a + hi_a) * s, (lo_a - hi_a) * s},
                              {(lo_b + hi_b) * s, (lo_b - hi_b) * s}};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const int rr = 2 * r + i;
          const int cc = 2 * c + j;
          if (rr < h && cc < w) out(rr, cc) = v[i][j];
        }
      }
    }
  }
  return out;
}

inline bool same_dims(const GrayImage& img, int h, int w) noexcept {
  return img.height() == h && img.width() == w;
}

}  // namespace detail

inline WaveletPyramid dwt2_forward(const GrayImage& img, int levels) {
  if (levels < 1) throw InvalidConfig("dwt levels must be >= 1");
  WaveletPyramid pyr;
  pyr.original_height = img.height();
  pyr.original_width = img.width();
  GrayImage cur = img;
  for (int k = 0; k < levels; ++k) {
    auto bands = detail::haar_analyze(cur);
    pyr.details.push_back(std::move(bands.d));
    cur = std::move(bands.ll);
  }
  pyr.ll = std::move(cur);
  return pyr;
}

inline GrayImage dwt2_inverse(const WaveletPyramid& pyr) {
  const int levels = pyr.levels();
  if (levels < 1) throw DimensionMismatch("pyramid has no detail levels");
  const int h0 = pyr.original_height;
  const int w0 = pyr.original_width;
  if (h0 < 1 || w0 < 1) throw DimensionMismatch("original dims must be positive");
  if (!detail::same_dims(pyr.ll, detail::level_dim(h0, levels), detail::level_dim(w0, levels))) {
    throw DimensionMismatch("LL dims inconsistent with original dims");
  }
  GrayImage cur = pyr.ll;
  for (int k = levels; k >= 1; --k) {
    const int sh = detail::level_dim(h0, k);
    const int sw = detail::level_dim(w0, k);
    const auto& d = pyr.details[k - 1];
    if (!detail::same_dims(d.lh, sh, sw) || !detail::same_dims(d.hl, sh, sw) ||
        !detail::same_dims(d.hh, sh, sw)) {
      throw DimensionMismatch("detail subband dims at level " + std::to_string(k) +
                              " inconsistent with original dims");
    }
    cur = detail::haar_synthesize(cur, d, detail::level_dim(h0, k - 1),
                                  detail::level_dim(w0, k - 1));
  }
  return cur;
}

// Detail-coefficient policies applied between analysis and synthesis.
struct KeepAll {
  friend bool operator==(const KeepAll&, const KeepAll&) = default;
};
struct ZeroLevel1 {
  friend bool operator==(const ZeroLevel1&, const ZeroLevel1&) = default;
};
struct ZeroAll {
  friend bool operator==(const ZeroAll&, const ZeroAll&) = default;
};
struct SoftThreshold {
  double t = 0.0;
  friend bool operator==(const SoftThreshold&, const SoftThreshold&) = default;
};
using DetailPolicy = std::variant<ZeroLevel1, ZeroAll, SoftThreshold, KeepAll>;

inline void apply_detail_policy(WaveletPyramid& pyr, const DetailPolicy& policy) {
  const auto zero = [](DetailBands& d) {
    for (GrayImage* b : {&d.lh, &d.hl, &d.hh}) {
      for (double& v : b->pixels()) v = 0.0;
    }
  };
  if (std::holds_alternative<ZeroLevel1>(policy)) {
    zero(pyr.details.front());
  } else if (std::holds_alternative<ZeroAll>(policy)) {
    for (auto& d : pyr.details) zero(d);
  } else if (const auto* st = std::get_if<SoftThreshold>(&policy)) {
    const double t = st->t;
    for (auto& d : pyr.details) {
      for (GrayImage* b : {&d.lh, &d.hl, &d.hh}) {
        for (double& v : b->pixels()) {
          const double m = std::max(std::abs(v) - t, 0.0);
          v = std::copysign(m, v);
        }
      }
    }
  }
}

/// Forward transform, detail policy, inverse transform.
inline GrayImage denoise_reconstruct(const GrayImage& img, int levels, const DetailPolicy& policy) {
  if (const auto* st = std::get_if<SoftThreshold>(&policy); st && !(st->t >= 0.0)) {
    throw InvalidConfig("soft threshold must be >= 0");
  }
  auto pyr = dwt2_forward(img, levels);
  apply_detail_policy(pyr, policy);
  return dwt2_inverse(pyr);
}

inline std::string policy_name(const DetailPolicy& p) {
  if (std::holds_alternative<ZeroLevel1>(p)) return "zero_level1";
  if (std::holds_alternative<ZeroAll>(p)) return "zero_all";
  if (std::holds_alternative<SoftThreshold>(p)) return "soft_threshold";
  return "keep_all";
}

}  // namespace mammo
