#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mammo/error.hpp"

namespace mammo {

/// Row-major grayscale raster with real-valued intensities, nominally [0, 255].
///
/// Coordinates are (row, col) with the origin at the top-left corner. The
/// pipeline keeps intensities as doubles between stages and only quantizes
/// when writing to disk.
class GrayImage {
 public:
  GrayImage() = default;

  GrayImage(int height, int width, double fill = 0.0)
      : height_(height), width_(width) {
    check_dims(height, width);
    pixels_.assign(static_cast<std::size_t>(height) * width, fill);
  }

  GrayImage(int height, int width, std::vector<double> pixels)
      : height_(height), width_(width), pixels_(std::move(pixels)) {
    check_dims(height, width);
    if (pixels_.size() != static_cast<std::size_t>(height) * width) {
      throw InvalidImage("pixel count " + std::to_string(pixels_.size()) +
                         " does not match " + std::to_string(height) + "x" +
                         std::to_string(width));
    }
    for (double v : pixels_) {
      if (!std::isfinite(v)) throw InvalidImage("non-finite intensity");
    }
  }

  /// Builds an image from nested rows; all rows must have equal length.
  static GrayImage from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) throw InvalidImage("empty rows");
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.front().size());
    std::vector<double> px;
    px.reserve(static_cast<std::size_t>(h) * w);
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != w) throw InvalidImage("ragged rows");
      px.insert(px.end(), r.begin(), r.end());
    }
    return GrayImage(h, w, std::move(px));
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  double operator()(int row, int col) const noexcept {
    return pixels_[static_cast<std::size_t>(row) * width_ + col];
  }
  double& operator()(int row, int col) noexcept {
    return pixels_[static_cast<std::size_t>(row) * width_ + col];
  }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }

  std::span<const double> pixels() const noexcept { return pixels_; }
  std::span<double> pixels() noexcept { return pixels_; }

  std::span<const double> row(int r) const noexcept {
    return std::span<const double>(pixels_).subspan(
        static_cast<std::size_t>(r) * width_, width_);
  }
  std::span<double> row(int r) noexcept {
    return std::span<double>(pixels_).subspan(
        static_cast<std::size_t>(r) * width_, width_);
  }

  double min() const { return *std::min_element(pixels_.begin(), pixels_.end()); }
  double max() const { return *std::max_element(pixels_.begin(), pixels_.end()); }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  static void check_dims(int height, int width) {
    if (height < 1 || width < 1) {
      throw InvalidImage("dimensions must be positive, got " +
                         std::to_string(height) + "x" + std::to_string(width));
    }
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<double> pixels_;
};

/// Row-major {0,1} raster.
class BinaryMask {
 public:
  BinaryMask() = default;

  BinaryMask(int height, int width, std::uint8_t fill = 0)
      : height_(height), width_(width) {
    if (height < 1 || width < 1) throw InvalidImage("mask dimensions must be positive");
    bits_.assign(static_cast<std::size_t>(height) * width, fill ? 1 : 0);
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return bits_.size(); }

  std::uint8_t operator()(int row, int col) const noexcept {
    return bits_[static_cast<std::size_t>(row) * width_ + col];
  }
  void set(int row, int col, bool on) noexcept {
    bits_[static_cast<std::size_t>(row) * width_ + col] = on ? 1 : 0;
  }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  std::size_t count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Round half-up and clamp to the 8-bit range.
inline double quantize_value(double v) noexcept {
  return std::clamp(std::floor(v + 0.5), 0.0, 255.0);
}

inline GrayImage quantize(const GrayImage& img) {
  GrayImage out = img;
  for (double& v : out.pixels()) v = quantize_value(v);
  return out;
}

inline GrayImage clamp_intensities(const GrayImage& img, double lo = 0.0, double hi = 255.0) {
  GrayImage out = img;
  for (double& v : out.pixels()) v = std::clamp(v, lo, hi);
  return out;
}

/// Mask as a {0, 255} image, handy for writing masks as PGM.
inline GrayImage mask_to_image(const BinaryMask& mask) {
  GrayImage out(mask.height(), mask.width());
  auto bits = mask.bits();
  auto px = out.pixels();
  for (std::size_t i = 0; i < bits.size(); ++i) px[i] = bits[i] ? 255.0 : 0.0;
  return out;
}

}  // namespace mammo
