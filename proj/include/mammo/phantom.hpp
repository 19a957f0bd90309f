#pragma once

// Synthetic mammogram phantoms: flat background, Gaussian noise, radial
// lesion blobs and optional elongated duct-like ridges that are not lesions.
//
// Randomness comes from SplitMix64 (Steele, Lea & Flood 2014):
//   state += 0x9E3779B97F4A7C15
//   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31)
// uniform() = (next() >> 11) * 2^-53 and normal() is Box-Muller on two
// uniforms (cosine branch only), so any implementation reproduces the pixels.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "mammo/error.hpp"
#include "mammo/image.hpp"
#include "mammo/mias.hpp"

namespace mammo {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  long long uniform_int(long long lo, long long hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long long>(next() % span);
  }

  double normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

/// amplitude * exp(-d^2 / (2 (radius/2)^2)) around (row, col).
struct PhantomBlob {
  double row = 0.0;
  double col = 0.0;
  double radius = 1.0;
  double amplitude = 0.0;
  friend bool operator==(const PhantomBlob&, const PhantomBlob&) = default;
};

/// Ridge along a segment: amplitude * exp(-dist^2 / (2 width^2)).
struct PhantomDuct {
  double row0 = 0.0, col0 = 0.0;
  double row1 = 0.0, col1 = 0.0;
  double width = 1.0;
  double amplitude = 0.0;
  friend bool operator==(const PhantomDuct&, const PhantomDuct&) = default;
};

struct PhantomSpec {
  std::string ref = "phantom";
  int height = 1024;
  int width = 1024;
  double background_level = 100.0;
  double noise_std = 0.0;
  std::vector<PhantomBlob> blobs;   // lesions, reported as ground truth
  std::vector<PhantomDuct> ducts;   // normal structure, not reported
  std::uint64_t seed = 0;

  void validate() const {
    if (height < 1 || width < 1) throw InvalidConfig("phantom dims must be positive");
    if (!(noise_std >= 0.0)) throw InvalidConfig("phantom noise_std must be >= 0");
    for (const auto& b : blobs) {
      if (b.row < 0 || b.row > height - 1 || b.col < 0 || b.col > width - 1) {
        throw InvalidConfig("blob center outside the image");
      }
      if (!(b.radius > 0.0)) throw InvalidConfig("blob radius must be > 0");
      if (!(b.amplitude > noise_std)) throw InvalidConfig("blob amplitude must exceed noise_std");
    }
    for (const auto& d : ducts) {
      if (!(d.width > 0.0)) throw InvalidConfig("duct width must be > 0");
    }
  }

  friend bool operator==(const PhantomSpec&, const PhantomSpec&) = default;
};

struct Phantom {
  GrayImage image;
  std::vector<MiasRecord> records;  // one per blob; empty for a normal phantom
};

namespace detail {

// Adds f(d2) over the window where the profile is not negligible (< 1e-12 of peak).
template <typename Dist2>
void add_profile(GrayImage& img, double amplitude, double sigma, double rmin, double rmax, double cmin,
                 double cmax, Dist2 dist2) {
  const double reach = sigma * std::sqrt(2.0 * std::log(1e12));
  const int r0 = std::max(0, static_cast<int>(std::floor(rmin - reach)));
  const int r1 = std::min(img.height() - 1, static_cast<int>(std::ceil(rmax + reach)));
  const int c0 = std::max(0, static_cast<int>(std::floor(cmin - reach)));
  const int c1 = std::min(img.width() - 1, static_cast<int>(std::ceil(cmax + reach)));
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) img(r, c) += amplitude * std::exp(-dist2(r, c) * inv);
  }
}

}  // namespace detail

inline Phantom generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  GrayImage img(spec.height, spec.width, spec.background_level);
  if (spec.noise_std > 0.0) {
    for (double& v : img.pixels()) v += spec.noise_std * rng.normal();
  }
  for (const auto& b : spec.blobs) {
    detail::add_profile(img, b.amplitude, b.radius / 2.0, b.row, b.row, b.col, b.col,
                        [&](int r, int c) {
                          const double dr = r - b.row, dc = c - b.col;
                          return dr * dr + dc * dc;
                        });
  }
  for (const auto& d : spec.ducts) {
    const double vr = d.row1 - d.row0, vc = d.col1 - d.col0;
    const double len2 = vr * vr + vc * vc;
    detail::add_profile(img, d.amplitude, d.width, std::min(d.row0, d.row1), std::max(d.row0, d.row1),
                        std::min(d.col0, d.col1), std::max(d.col0, d.col1), [&](int r, int c) {
                          double t = len2 > 0.0 ? ((r - d.row0) * vr + (c - d.col0) * vc) / len2 : 0.0;
                          t = std::clamp(t, 0.0, 1.0);
                          const double pr = r - (d.row0 + t * vr), pc = c - (d.col0 + t * vc);
                          return pr * pr + pc * pc;
                        });
  }

  Phantom out{quantize(img), {}};
  for (const auto& b : spec.blobs) {
    MiasRecord rec;
    rec.ref = spec.ref;
    rec.tissue = Tissue::fatty;
    rec.abnormality = Abnormality::circ;
    rec.severity = Severity::benign;
    rec.x = b.col;
    rec.y = spec.height - 1.0 - b.row;
    rec.radius = b.radius;
    out.records.push_back(rec);
  }
  return out;
}

/// Parameters for drawing a whole corpus of one-lesion phantoms.
struct CorpusSpec {
  int count = 200;
  std::uint64_t seed = 1;
  std::string ref_prefix = "ph";
  int height = 1024;
  int width = 1024;
  double background_level = 100.0;
  double noise_std = 6.0;
  double normal_fraction = 0.0;  // share of phantoms drawn without a lesion
  double blob_radius_min = 20.0, blob_radius_max = 40.0;
  double amplitude_min = 48.0, amplitude_max = 72.0;  // >= 5x noise_std by default
  int duct_count_min = 8, duct_count_max = 12;
  double duct_length_min = 120.0, duct_length_max = 300.0;
  double duct_width_min = 1.5, duct_width_max = 3.0;
  double duct_amplitude_min = 0.6, duct_amplitude_max = 1.2;  // relative to the lesion amplitude
  double border_margin = 150.0;  // lesion centers keep this distance from the edges
  double duct_clearance = 40.0;  // ducts keep this distance from the lesion edge

  void validate() const {
    if (count < 0) throw InvalidConfig("corpus count must be >= 0");
    if (!(normal_fraction >= 0.0 && normal_fraction <= 1.0)) {
      throw InvalidConfig("corpus normal_fraction must be in [0, 1]");
    }
    if (blob_radius_min <= 0 || blob_radius_max < blob_radius_min) throw InvalidConfig("bad blob radius range");
    if (amplitude_max < amplitude_min || !(amplitude_min > noise_std)) {
      throw InvalidConfig("bad amplitude range (must exceed noise_std)");
    }
    if (duct_count_min < 0 || duct_count_max < duct_count_min) throw InvalidConfig("bad duct count range");
    if (duct_length_min <= 0 || duct_length_max < duct_length_min) throw InvalidConfig("bad duct length range");
    if (duct_width_min <= 0 || duct_width_max < duct_width_min) throw InvalidConfig("bad duct width range");
    if (2 * border_margin >= std::min(height, width)) throw InvalidConfig("border margin too large");
  }

  friend bool operator==(const CorpusSpec&, const CorpusSpec&) = default;
};

inline std::string corpus_ref(const CorpusSpec& c, int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", index + 1);
  return c.ref_prefix + buf;
}

/// Draws `count` phantom specs deterministically from the corpus seed.
inline std::vector<PhantomSpec> make_corpus(const CorpusSpec& c) {
  c.validate();
  SplitMix64 rng(c.seed);
  std::vector<PhantomSpec> out;
  out.reserve(c.count);
  for (int i = 0; i < c.count; ++i) {
    PhantomSpec p;
    p.ref = corpus_ref(c, i);
    p.height = c.height;
    p.width = c.width;
    p.background_level = c.background_level;
    p.noise_std = c.noise_std;
    p.seed = rng.next();
    const bool normal = rng.uniform() < c.normal_fraction;
    const double amplitude = rng.uniform(c.amplitude_min, c.amplitude_max);
    PhantomBlob blob;
    blob.row = static_cast<double>(rng.uniform_int(static_cast<long long>(c.border_margin),
                                                   static_cast<long long>(c.height - 1 - c.border_margin)));
    blob.col = static_cast<double>(rng.uniform_int(static_cast<long long>(c.border_margin),
                                                   static_cast<long long>(c.width - 1 - c.border_margin)));
    blob.radius = std::round(rng.uniform(c.blob_radius_min, c.blob_radius_max));
    blob.amplitude = amplitude;
    if (!normal) p.blobs.push_back(blob);

    const int ducts = static_cast<int>(rng.uniform_int(c.duct_count_min, c.duct_count_max));
    const double keep_out = blob.radius + c.duct_clearance;
    for (int k = 0, attempts = 0; k < ducts && attempts < 1000; ++attempts) {
      const double r0 = rng.uniform(50.0, c.height - 50.0);
      const double c0 = rng.uniform(50.0, c.width - 50.0);
      const double angle = rng.uniform(0.0, std::numbers::pi);
      const double len = rng.uniform(c.duct_length_min, c.duct_length_max);
      const double w = rng.uniform(c.duct_width_min, c.duct_width_max);
      const double a = amplitude * rng.uniform(c.duct_amplitude_min, c.duct_amplitude_max);
      const double r1 = r0 + len * std::sin(angle), c1 = c0 + len * std::cos(angle);
      if (r1 < 0 || r1 > c.height - 1 || c1 < 0 || c1 > c.width - 1) continue;
      // Distance from the lesion center to the segment.
      const double vr = r1 - r0, vc = c1 - c0;
      const double t = std::clamp(((blob.row - r0) * vr + (blob.col - c0) * vc) / (vr * vr + vc * vc), 0.0, 1.0);
      const double dr = blob.row - (r0 + t * vr), dc = blob.col - (c0 + t * vc);
      if (!normal && dr * dr + dc * dc < keep_out * keep_out) continue;
      p.ducts.push_back({r0, c0, r1, c1, w, a});
      ++k;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace mammo
