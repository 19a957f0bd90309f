#pragma once

// Flat grayscale morphology with arbitrary symmetric structuring elements.
//
// Erosion and dilation are computed by splitting the element into horizontal
// runs, evaluating each distinct run with the van Herk / Gil-Werman running
// min/max (O(1) per pixel regardless of run length), and folding the shifted
// rows together. Out-of-bounds samples are excluded from the min/max, which for
// an element containing its origin equals edge replication.

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "mammo/error.hpp"
#include "mammo/image.hpp"

namespace mammo {

struct Offset {
  int dr = 0;
  int dc = 0;
  friend auto operator<=>(const Offset&, const Offset&) = default;
};

class StructuringElement {
 public:
  explicit StructuringElement(std::vector<Offset> offsets) : offsets_(std::move(offsets)) {
    std::sort(offsets_.begin(), offsets_.end());
    offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
    if (!std::binary_search(offsets_.begin(), offsets_.end(), Offset{0, 0})) {
      throw InvalidConfig("structuring element must contain the origin");
    }
    for (const auto& o : offsets_) {
      if (!std::binary_search(offsets_.begin(), offsets_.end(), Offset{-o.dr, -o.dc})) {
        throw InvalidConfig("structuring element must be symmetric under negation");
      }
    }
  }

  const std::vector<Offset>& offsets() const noexcept { return offsets_; }
  std::size_t size() const noexcept { return offsets_.size(); }

 private:
  std::vector<Offset> offsets_;  // sorted by (dr, dc)
};

/// Disk { (dr, dc) : dr^2 + dc^2 <= radius^2 }.
inline StructuringElement disk_se(int radius) {
  if (radius < 0) throw InvalidConfig("disk radius must be >= 0");
  std::vector<Offset> off;
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      if (dr * dr + dc * dc <= radius * radius) off.push_back({dr, dc});
    }
  }
  return StructuringElement(std::move(off));
}

namespace detail {

struct Run {
  int lo;
  int hi;
  friend auto operator<=>(const Run&, const Run&) = default;
};

// Row offset -> maximal contiguous column runs.
inline std::map<int, std::vector<Run>> row_runs(const StructuringElement& se) {
  std::map<int, std::vector<Run>> runs;
  const auto& off = se.offsets();
  for (std::size_t i = 0; i < off.size();) {
    std::size_t j = i;
    while (j + 1 < off.size() && off[j + 1].dr == off[i].dr && off[j + 1].dc == off[j].dc + 1) ++j;
    runs[off[i].dr].push_back({off[i].dc, off[j].dc});
    i = j + 1;
  }
  return runs;
}

// out[c] = op over src[c+lo .. c+hi] clipped to [0, n); identity when empty.
template <typename Op>
void window_extreme(std::span<const double> src, Run run, double identity, Op op,
                    std::vector<double>& padded, std::vector<double>& prefix,
                    std::vector<double>& suffix, std::span<double> out) {
  const int n = static_cast<int>(src.size());
  const int len = run.hi - run.lo + 1;
  // Padded index p corresponds to source index p - pad.
  const int pad = std::max({0, -run.lo, run.hi});
  const int total = n + 2 * pad + len;
  padded.assign(total, identity);
  std::copy(src.begin(), src.end(), padded.begin() + pad);
  prefix.resize(total);
  suffix.resize(total);
  for (int b = 0; b < total; b += len) {
    const int e = std::min(b + len, total);
    prefix[b] = padded[b];
    for (int i = b + 1; i < e; ++i) prefix[i] = op(prefix[i - 1], padded[i]);
    suffix[e - 1] = padded[e - 1];
    for (int i = e - 2; i >= b; --i) suffix[i] = op(suffix[i + 1], padded[i]);
  }
  for (int c = 0; c < n; ++c) {
    const int start = c + run.lo + pad;
    const int stop = start + len - 1;
    out[c] = op(suffix[start], prefix[stop]);
  }
}

template <typename Op>
GrayImage flat_filter(const GrayImage& img, const StructuringElement& se, double identity, Op op,
                      bool reflect) {
  const int h = img.height();
  const int w = img.width();
  auto runs = row_runs(se);

  // Group row offsets by run set so each distinct run pattern is filtered once.
  std::map<std::vector<Run>, std::vector<int>> by_pattern;
  for (auto& [dr, rs] : runs) {
    std::vector<Run> pattern = rs;
    int row_off = dr;
    if (reflect) {
      // Dilation uses the reflected element: (dr, dc) -> (-dr, -dc).
      row_off = -dr;
      for (auto& r : pattern) r = {-r.hi, -r.lo};
      std::sort(pattern.begin(), pattern.end());
    }
    by_pattern[pattern].push_back(row_off);
  }

  GrayImage out(h, w, identity);
  GrayImage filtered(h, w);
  std::vector<double> padded, prefix, suffix, scratch(w);
  for (const auto& [pattern, row_offsets] : by_pattern) {
    for (int r = 0; r < h; ++r) {
      auto dst = filtered.row(r);
      bool first = true;
      for (const Run& run : pattern) {
        if (first) {
          window_extreme(img.row(r), run, identity, op, padded, prefix, suffix, dst);
          first = false;
        } else {
          window_extreme(img.row(r), run, identity, op, padded, prefix, suffix, scratch);
          for (int c = 0; c < w; ++c) dst[c] = op(dst[c], scratch[c]);
        }
      }
    }
    for (int dr : row_offsets) {
      const int r0 = std::max(0, -dr);
      const int r1 = std::min(h, h - dr);
      for (int r = r0; r < r1; ++r) {
        auto dst = out.row(r);
        auto src = filtered.row(r + dr);
        for (int c = 0; c < w; ++c) dst[c] = op(dst[c], src[c]);
      }
    }
  }
  return out;
}

}  // namespace detail

/// Grayscale erosion: minimum over the element's in-bounds support.
inline GrayImage erode(const GrayImage& img, const StructuringElement& se) {
  return detail::flat_filter(
      img, se, std::numeric_limits<double>::infinity(),
      [](double a, double b) { return std::min(a, b); }, false);
}

/// Grayscale dilation: maximum over the reflected element's in-bounds support.
inline GrayImage dilate(const GrayImage& img, const StructuringElement& se) {
  return detail::flat_filter(
      img, se, -std::numeric_limits<double>::infinity(),
      [](double a, double b) { return std::max(a, b); }, true);
}

inline GrayImage opening(const GrayImage& img, const StructuringElement& se) {
  return dilate(erode(img, se), se);
}

inline GrayImage closing(const GrayImage& img, const StructuringElement& se) {
  return erode(dilate(img, se), se);
}

/// White top-hat: image minus its opening. Non-negative everywhere.
inline GrayImage tophat(const GrayImage& img, const StructuringElement& se) {
  GrayImage out = opening(img, se);
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] - dst[i];
  return out;
}

}  // namespace mammo
