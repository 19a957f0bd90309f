#pragma once

// Region properties: area, centroid, equivalent-ellipse axes, eccentricity,
// orientation, filled area, extrema, solidity and equivalent diameter.
//
// Pixel model: pixel (r, c) is the unit square [r, r+1] x [c, c+1] for the
// corner-based quantities (extrema, convex hull) while the centroid and
// moments use the pixel index as its center. Second moments carry the 1/12
// variance of a unit square.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "mammo/error.hpp"
#include "mammo/segment.hpp"

namespace mammo {

struct MomentSet {
  double m00 = 0.0;
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  double mu_rr = 0.0;  // row variance + 1/12
  double mu_cc = 0.0;  // column variance + 1/12
  double mu_rc = 0.0;  // row/column covariance
};

inline MomentSet central_moments(const Region& region) {
  if (region.pixels.empty()) throw InvalidConfig("empty region");
  const double n = static_cast<double>(region.pixels.size());
  double sr = 0.0, sc = 0.0;
  for (const auto& p : region.pixels) {
    sr += p.row;
    sc += p.col;
  }
  MomentSet m;
  m.m00 = n;
  m.centroid_row = sr / n;
  m.centroid_col = sc / n;
  double rr = 0.0, cc = 0.0, rc = 0.0;
  for (const auto& p : region.pixels) {
    const double dr = p.row - m.centroid_row;
    const double dc = p.col - m.centroid_col;
    rr += dr * dr;
    cc += dc * dc;
    rc += dr * dc;
  }
  m.mu_rr = rr / n + 1.0 / 12.0;
  m.mu_cc = cc / n + 1.0 / 12.0;
  m.mu_rc = rc / n;
  return m;
}

struct EllipseParams {
  double major_axis_length = 0.0;
  double minor_axis_length = 0.0;
  double eccentricity = 0.0;
  double orientation_deg = 0.0;  // (-90, 90], counter-clockwise from +col with rows pointing down
};

inline EllipseParams ellipse_params(const MomentSet& m) {
  const double a = m.mu_cc;
  const double d = m.mu_rr;
  const double b = m.mu_rc;
  const double mean = 0.5 * (a + d);
  const double radius = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  const double l1 = mean + radius;
  const double l2 = std::max(mean - radius, 0.0);

  EllipseParams e;
  e.major_axis_length = 4.0 * std::sqrt(l1);
  e.minor_axis_length = 4.0 * std::sqrt(l2);
  if (l1 - l2 <= 1e-12) {
    e.eccentricity = 0.0;
    e.orientation_deg = 0.0;
    return e;
  }
  e.eccentricity = std::sqrt(std::max(0.0, 1.0 - l2 / l1));
  // In (x = col, y = -row) coordinates the covariance term flips sign.
  double theta = 0.5 * std::atan2(-2.0 * b, a - d) * 180.0 / std::numbers::pi;
  if (theta <= -90.0) theta += 180.0;
  e.orientation_deg = theta + 0.0;  // no negative zero
  return e;
}

/// Region pixels plus every enclosed background pixel, i.e. every pixel of the
/// bounding box not 4-connected to the box border through non-region pixels.
inline std::vector<Pixel> fill_holes(const Region& region) {
  const auto& bb = region.bbox;
  const int h = bb.max_row - bb.min_row + 1;
  const int w = bb.max_col - bb.min_col + 1;
  // 0 = background, 1 = region, 2 = background reached from the border
  std::vector<std::uint8_t> grid(static_cast<std::size_t>(h) * w, 0);
  for (const auto& p : region.pixels) {
    grid[static_cast<std::size_t>(p.row - bb.min_row) * w + (p.col - bb.min_col)] = 1;
  }
  std::vector<int> stack;
  const auto seed = [&](int r, int c) {
    auto& g = grid[static_cast<std::size_t>(r) * w + c];
    if (g == 0) {
      g = 2;
      stack.push_back(r * w + c);
    }
  };
  for (int r = 0; r < h; ++r) {
    seed(r, 0);
    seed(r, w - 1);
  }
  for (int c = 0; c < w; ++c) {
    seed(0, c);
    seed(h - 1, c);
  }
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    const int r = cur / w, c = cur % w;
    if (r > 0) seed(r - 1, c);
    if (r + 1 < h) seed(r + 1, c);
    if (c > 0) seed(r, c - 1);
    if (c + 1 < w) seed(r, c + 1);
  }
  std::vector<Pixel> filled;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (grid[static_cast<std::size_t>(r) * w + c] != 2) filled.push_back({r + bb.min_row, c + bb.min_col});
    }
  }
  return filled;
}

struct Point2 {
  double row = 0.0;
  double col = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// The eight extremal corner points, ordered top-left, top-right, right-top,
/// right-bottom, bottom-right, bottom-left, left-bottom, left-top.
inline std::array<Point2, 8> extrema(const Region& region) {
  const auto& bb = region.bbox;
  int top_cmin = bb.max_col, top_cmax = bb.min_col;
  int bot_cmin = bb.max_col, bot_cmax = bb.min_col;
  int left_rmin = bb.max_row, left_rmax = bb.min_row;
  int right_rmin = bb.max_row, right_rmax = bb.min_row;
  for (const auto& p : region.pixels) {
    if (p.row == bb.min_row) {
      top_cmin = std::min(top_cmin, p.col);
      top_cmax = std::max(top_cmax, p.col);
    }
    if (p.row == bb.max_row) {
      bot_cmin = std::min(bot_cmin, p.col);
      bot_cmax = std::max(bot_cmax, p.col);
    }
    if (p.col == bb.min_col) {
      left_rmin = std::min(left_rmin, p.row);
      left_rmax = std::max(left_rmax, p.row);
    }
    if (p.col == bb.max_col) {
      right_rmin = std::min(right_rmin, p.row);
      right_rmax = std::max(right_rmax, p.row);
    }
  }
  const double top = bb.min_row, bottom = bb.max_row + 1.0;
  const double left = bb.min_col, right = bb.max_col + 1.0;
  return {{{top, static_cast<double>(top_cmin)},
           {top, top_cmax + 1.0},
           {static_cast<double>(right_rmin), right},
           {right_rmax + 1.0, right},
           {bottom, bot_cmax + 1.0},
           {bottom, static_cast<double>(bot_cmin)},
           {left_rmax + 1.0, left},
           {static_cast<double>(left_rmin), left}}};
}

namespace detail {

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.col - o.col) * (b.row - o.row) - (a.row - o.row) * (b.col - o.col);
}

}  // namespace detail

/// Convex hull (monotone chain) of a point set; collinear points dropped.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && detail::cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && detail::cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline double polygon_area(const std::vector<Point2>& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    twice += p.col * q.row - q.col * p.row;
  }
  return std::abs(twice) * 0.5;
}

/// Hull area over the four corners of every pixel. Only the leftmost and
/// rightmost pixel of each row can contribute hull vertices.
inline double convex_hull_area(const Region& region) {
  const auto& bb = region.bbox;
  const int h = bb.max_row - bb.min_row + 1;
  std::vector<int> cmin(h, bb.max_col + 1), cmax(h, bb.min_col - 1);
  for (const auto& p : region.pixels) {
    const int i = p.row - bb.min_row;
    cmin[i] = std::min(cmin[i], p.col);
    cmax[i] = std::max(cmax[i], p.col);
  }
  std::vector<Point2> corners;
  corners.reserve(8 * static_cast<std::size_t>(h));
  for (int i = 0; i < h; ++i) {
    if (cmax[i] < cmin[i]) continue;
    const double r = bb.min_row + i;
    for (double dr : {0.0, 1.0}) {
      corners.push_back({r + dr, static_cast<double>(cmin[i])});
      corners.push_back({r + dr, cmax[i] + 1.0});
    }
  }
  return polygon_area(convex_hull(std::move(corners)));
}

inline double solidity(const Region& region) {
  return static_cast<double>(region.area()) / convex_hull_area(region);
}

inline double equiv_diameter(double area) { return std::sqrt(4.0 * area / std::numbers::pi); }
inline double equiv_diameter(const Region& region) {
  return equiv_diameter(static_cast<double>(region.area()));
}

/// Number of values in a full feature vector.
inline constexpr std::size_t kFeatureCount = 26;

/// Column names of the full feature vector, in layout order.
inline const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n = {"area",
                                  "centroid_row",
                                  "centroid_col",
                                  "major_axis_length",
                                  "minor_axis_length",
                                  "eccentricity",
                                  "orientation",
                                  "filled_area"};
    static const char* kExt[8] = {"top_left",     "top_right",   "right_top", "right_bottom",
                                  "bottom_right", "bottom_left", "left_bottom", "left_top"};
    for (const char* e : kExt) {
      n.push_back(std::string("extrema_") + e + "_row");
      n.push_back(std::string("extrema_") + e + "_col");
    }
    n.push_back("solidity");
    n.push_back("equiv_diameter");
    return n;
  }();
  return names;
}

/// The ten property names and the feature columns each expands to.
inline const std::vector<std::pair<std::string, std::vector<std::string>>>& property_columns() {
  static const auto props = [] {
    const auto& n = feature_names();
    std::vector<std::pair<std::string, std::vector<std::string>>> p = {
        {"area", {n[0]}},
        {"centroid", {n[1], n[2]}},
        {"major_axis_length", {n[3]}},
        {"minor_axis_length", {n[4]}},
        {"eccentricity", {n[5]}},
        {"orientation", {n[6]}},
        {"filled_area", {n[7]}},
        {"extrema", std::vector<std::string>(n.begin() + 8, n.begin() + 24)},
        {"solidity", {n[24]}},
        {"equiv_diameter", {n[25]}}};
    return p;
  }();
  return props;
}

/// Expands property names (or individual column names) into feature columns,
/// in layout order. An empty selection means every column.
inline std::vector<std::string> select_feature_columns(const std::vector<std::string>& selection) {
  const auto& all = feature_names();
  if (selection.empty()) return all;
  std::vector<bool> keep(all.size(), false);
  for (const auto& s : selection) {
    bool found = false;
    for (const auto& [prop, cols] : property_columns()) {
      if (prop != s) continue;
      found = true;
      for (const auto& col : cols) {
        keep[std::find(all.begin(), all.end(), col) - all.begin()] = true;
      }
    }
    if (auto it = std::find(all.begin(), all.end(), s); it != all.end()) {
      found = true;
      keep[it - all.begin()] = true;
    }
    if (!found) throw InvalidConfig("unknown feature '" + s + "'");
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (keep[i]) out.push_back(all[i]);
  }
  return out;
}

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double area() const noexcept { return values[0]; }
  double centroid_row() const noexcept { return values[1]; }
  double centroid_col() const noexcept { return values[2]; }
  double major_axis_length() const noexcept { return values[3]; }
  double minor_axis_length() const noexcept { return values[4]; }
  double eccentricity() const noexcept { return values[5]; }
  double orientation() const noexcept { return values[6]; }
  double filled_area() const noexcept { return values[7]; }
  double solidity() const noexcept { return values[24]; }
  double equiv_diameter() const noexcept { return values[25]; }

  /// Values of the named columns, in the given order.
  std::vector<double> select(const std::vector<std::string>& columns) const {
    const auto& all = feature_names();
    std::vector<double> out;
    out.reserve(columns.size());
    for (const auto& c : columns) {
      auto it = std::find(all.begin(), all.end(), c);
      if (it == all.end()) throw InvalidConfig("unknown feature column '" + c + "'");
      out.push_back(values[it - all.begin()]);
    }
    return out;
  }
};

inline FeatureVector extract_features(const Region& region) {
  const MomentSet m = central_moments(region);
  const EllipseParams e = ellipse_params(m);
  FeatureVector f;
  auto& v = f.values;
  v[0] = m.m00;
  v[1] = m.centroid_row;
  v[2] = m.centroid_col;
  v[3] = e.major_axis_length;
  v[4] = e.minor_axis_length;
  v[5] = e.eccentricity;
  v[6] = e.orientation_deg;
  v[7] = static_cast<double>(fill_holes(region).size());
  const auto ext = extrema(region);
  for (std::size_t i = 0; i < ext.size(); ++i) {
    v[8 + 2 * i] = ext[i].row;
    v[9 + 2 * i] = ext[i].col;
  }
  v[24] = m.m00 / convex_hull_area(region);
  v[25] = equiv_diameter(m.m00);
  return f;
}

}  // namespace mammo
