#pragma once

// mini-MIAS ground truth. One line per abnormality:
//   <ref> <tissue F|G|D> <class CALC|CIRC|SPIC|MISC|ARCH|ASYM|NORM> [<severity B|M> [<x> <y> <radius>]]
// x is measured from the left edge and y from the BOTTOM edge of the image.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mammo/error.hpp"

namespace mammo {

enum class Tissue { fatty, glandular, dense };
enum class Abnormality { calc, circ, spic, misc, arch, asym, norm };
enum class Severity { benign, malignant };

struct MiasRecord {
  std::string ref;
  Tissue tissue = Tissue::fatty;
  Abnormality abnormality = Abnormality::norm;
  std::optional<Severity> severity;
  std::optional<double> x;  // px from the left
  std::optional<double> y;  // px from the bottom
  std::optional<double> radius;

  bool is_normal() const noexcept { return abnormality == Abnormality::norm; }
  bool has_location() const noexcept { return x.has_value() && y.has_value() && radius.has_value(); }

  friend bool operator==(const MiasRecord&, const MiasRecord&) = default;
};

inline char tissue_code(Tissue t) {
  switch (t) {
    case Tissue::fatty: return 'F';
    case Tissue::glandular: return 'G';
    case Tissue::dense: return 'D';
  }
  return '?';
}

inline std::string abnormality_code(Abnormality a) {
  switch (a) {
    case Abnormality::calc: return "CALC";
    case Abnormality::circ: return "CIRC";
    case Abnormality::spic: return "SPIC";
    case Abnormality::misc: return "MISC";
    case Abnormality::arch: return "ARCH";
    case Abnormality::asym: return "ASYM";
    case Abnormality::norm: return "NORM";
  }
  return "?";
}

namespace detail {

inline double parse_coordinate(const std::string& tok, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw NonNumericCoordinate(std::string(what) + " '" + tok + "' is not a number");
  }
  return v;
}

inline std::string format_number(double v) {
  char buf[40];
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

}  // namespace detail

inline MiasRecord parse_mias_info(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tok;
  for (std::string t; in >> t;) {
    if (t.front() == '*') break;  // trailing annotations such as "*NOTE 3*"
    tok.push_back(t);
  }
  if (tok.size() < 3) throw BadTokenCount("expected at least 3 tokens in '" + line + "'");

  MiasRecord rec;
  rec.ref = tok[0];
  if (tok[1] == "F") rec.tissue = Tissue::fatty;
  else if (tok[1] == "G") rec.tissue = Tissue::glandular;
  else if (tok[1] == "D") rec.tissue = Tissue::dense;
  else throw UnknownCode("tissue code '" + tok[1] + "'");

  static const std::map<std::string, Abnormality> kClasses = {
      {"CALC", Abnormality::calc}, {"CIRC", Abnormality::circ}, {"SPIC", Abnormality::spic},
      {"MISC", Abnormality::misc}, {"ARCH", Abnormality::arch}, {"ASYM", Abnormality::asym},
      {"NORM", Abnormality::norm}};
  const auto cls = kClasses.find(tok[2]);
  if (cls == kClasses.end()) throw UnknownCode("abnormality code '" + tok[2] + "'");
  rec.abnormality = cls->second;

  if (rec.is_normal()) {
    if (tok.size() != 3) throw BadTokenCount("NORM line must have 3 tokens: '" + line + "'");
    return rec;
  }
  if (tok.size() != 4 && tok.size() != 7) {
    throw BadTokenCount("abnormal line must have 4 or 7 tokens: '" + line + "'");
  }
  if (tok[3] == "B") rec.severity = Severity::benign;
  else if (tok[3] == "M") rec.severity = Severity::malignant;
  else throw UnknownCode("severity code '" + tok[3] + "'");
  if (tok.size() == 7) {
    rec.x = detail::parse_coordinate(tok[4], "x");
    rec.y = detail::parse_coordinate(tok[5], "y");
    rec.radius = detail::parse_coordinate(tok[6], "radius");
    if (!(*rec.radius > 0.0)) throw NonNumericCoordinate("radius must be > 0 in '" + line + "'");
  }
  return rec;
}

/// Parses a whole info file; blank lines and lines starting with '#' are skipped.
inline std::vector<MiasRecord> parse_mias_info_file(const std::string& text) {
  std::vector<MiasRecord> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(parse_mias_info(line));
  }
  return out;
}

inline std::string format_mias_record(const MiasRecord& rec) {
  std::string s = rec.ref + " " + tissue_code(rec.tissue) + " " + abnormality_code(rec.abnormality);
  if (rec.is_normal()) return s;
  s += rec.severity == Severity::malignant ? " M" : " B";
  if (rec.has_location()) {
    s += " " + detail::format_number(*rec.x) + " " + detail::format_number(*rec.y) + " " +
         detail::format_number(*rec.radius);
  }
  return s;
}

struct ImagePoint {
  double row = 0.0;
  double col = 0.0;
};

/// Converts a bottom-origin MIAS center to (row, col) with row 0 at the top.
inline ImagePoint gt_to_image_coords(const MiasRecord& rec, int image_height) {
  if (!rec.x || !rec.y) throw MissingCoordinates("record " + rec.ref + " has no center");
  return {static_cast<double>(image_height) - 1.0 - *rec.y, *rec.x};
}

/// Records grouped by image ref, in ascending ref order.
inline std::map<std::string, std::vector<MiasRecord>> group_by_ref(const std::vector<MiasRecord>& recs) {
  std::map<std::string, std::vector<MiasRecord>> out;
  for (const auto& r : recs) out[r.ref].push_back(r);
  return out;
}

}  // namespace mammo
