#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mammo/error.hpp"
#include "mammo/gaussian.hpp"
#include "mammo/image.hpp"
#include "mammo/morphology.hpp"
#include "mammo/wavelet.hpp"

namespace mammo {

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value (rank >= 1).
inline double percentile_nearest_rank(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidImage("percentile of empty set");
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

/// Linear stretch of the [p_low, p_high] percentile range onto [0, 255].
/// Returns the input unchanged when both percentiles coincide.
inline GrayImage contrast_stretch(const GrayImage& img, double p_low, double p_high) {
  if (!(p_low >= 0.0 && p_low < p_high && p_high <= 100.0)) {
    throw InvalidConfig("percentiles must satisfy 0 <= low < high <= 100");
  }
  std::vector<double> v(img.pixels().begin(), img.pixels().end());
  const double a = percentile_nearest_rank(v, p_low);
  const double b = percentile_nearest_rank(std::move(v), p_high);
  if (a == b) return img;
  GrayImage out = img;
  const double range = b - a;
  for (double& x : out.pixels()) x = std::clamp((x - a) / range * 255.0, 0.0, 255.0);
  return out;
}

struct EnhanceConfig {
  double gaussian_sigma = 1.5;
  int se_radius = 45;
  double stretch_low = 1.0;
  double stretch_high = 99.0;
  int dwt_levels = 2;
  DetailPolicy detail_policy = ZeroLevel1{};

  void validate() const {
    if (!(gaussian_sigma > 0.0)) throw NonPositiveSigma("enhance.gaussian_sigma must be > 0");
    if (se_radius < 1) throw InvalidConfig("enhance.se_radius must be >= 1");
    if (!(stretch_low >= 0.0 && stretch_low < stretch_high && stretch_high <= 100.0)) {
      throw InvalidConfig("enhance.stretch percentiles must satisfy 0 <= low < high <= 100");
    }
    if (dwt_levels < 1) throw InvalidConfig("enhance.dwt_levels must be >= 1");
    if (const auto* st = std::get_if<SoftThreshold>(&detail_policy); st && !(st->t >= 0.0)) {
      throw InvalidConfig("enhance soft threshold must be >= 0");
    }
  }

  friend bool operator==(const EnhanceConfig&, const EnhanceConfig&) = default;
};

/// Intermediate rasters of one enhancement run, for inspection and tests.
struct EnhanceStages {
  GrayImage smoothed;
  GrayImage stretched;
  GrayImage tophat;
  GrayImage enhanced;
};

/// Gaussian smoothing -> contrast stretch -> white top-hat (disk) -> wavelet
/// detail suppression, clamped to [0, 255]. The stage order is fixed.
inline EnhanceStages enhance_stages(const GrayImage& img, const EnhanceConfig& cfg) {
  cfg.validate();
  EnhanceStages s;
  s.smoothed = gaussian_smooth(img, cfg.gaussian_sigma);
  s.stretched = contrast_stretch(s.smoothed, cfg.stretch_low, cfg.stretch_high);
  s.tophat = tophat(s.stretched, disk_se(cfg.se_radius));
  s.enhanced = clamp_intensities(denoise_reconstruct(s.tophat, cfg.dwt_levels, cfg.detail_policy));
  return s;
}

inline GrayImage enhance(const GrayImage& img, const EnhanceConfig& cfg = {}) {
  return enhance_stages(img, cfg).enhanced;
}

}  // namespace mammo
