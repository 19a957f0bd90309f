#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mammo/error.hpp"
#include "mammo/image.hpp"

namespace mammo {

/// Sampled Gaussian of half-width ceil(3 sigma), normalized to unit sum.
inline std::vector<double> gaussian_kernel_1d(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw NonPositiveSigma("sigma must be > 0, got " + std::to_string(sigma));
  }
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * half + 1);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    k[i + half] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
  }
  // Pairwise from the tails in so the sum is symmetric in rounding.
  for (int i = 0; i < half; ++i) sum += k[i] + k[2 * half - i];
  sum += k[half];
  for (double& v : k) v /= sum;
  return k;
}

/// Separable Gaussian blur (rows, then columns) with edge replication.
inline GrayImage gaussian_smooth(const GrayImage& img, double sigma) {
  const auto k = gaussian_kernel_1d(sigma);
  const int half = static_cast<int>(k.size() / 2);
  const int h = img.height();
  const int w = img.width();

  GrayImage tmp(h, w);
  std::vector<double> padded(w + 2 * half);
  for (int r = 0; r < h; ++r) {
    auto src = img.row(r);
    for (int i = 0; i < w + 2 * half; ++i) {
      padded[i] = src[std::clamp(i - half, 0, w - 1)];
    }
    auto dst = tmp.row(r);
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int t = 0; t < static_cast<int>(k.size()); ++t) acc += k[t] * padded[c + t];
      dst[c] = acc;
    }
  }

  GrayImage out(h, w);
  std::vector<double> acc(w);
  for (int r = 0; r < h; ++r) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int t = 0; t < static_cast<int>(k.size()); ++t) {
      auto src = tmp.row(std::clamp(r + t - half, 0, h - 1));
      const double kt = k[t];
      for (int c = 0; c < w; ++c) acc[c] += kt * src[c];
    }
    auto dst = out.row(r);
    for (int c = 0; c < w; ++c) dst[c] = acc[c];
  }
  return out;
}

}  // namespace mammo
