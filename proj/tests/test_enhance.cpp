#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "mammo/enhance.hpp"
#include "mammo/gaussian.hpp"
#include "mammo/morphology.hpp"
#include "mammo/phantom.hpp"
#include "mammo/wavelet.hpp"
#include "oracles.hpp"

using namespace mammo;

TEST(Gaussian, Kernel) {
  const auto k01 = gaussian_kernel_1d(0.1);
  ASSERT_EQ(k01.size(), 3u);
  EXPECT_GE(k01[1], 0.999);
  const auto k1 = gaussian_kernel_1d(1.0);
  ASSERT_EQ(k1.size(), 7u);
  for (int i = 0; i < 7; ++i) EXPECT_EQ(k1[i], k1[6 - i]);
  for (double s : {0.3, 1.0, 1.5, 2.7, 6.0}) {
    const auto k = gaussian_kernel_1d(s);
    EXPECT_EQ(k.size(), 2 * static_cast<std::size_t>(std::ceil(3 * s)) + 1);
    EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-12);
  }
  EXPECT_THROW(gaussian_kernel_1d(0.0), NonPositiveSigma);
  EXPECT_THROW(gaussian_smooth(GrayImage(2, 2), -1.0), NonPositiveSigma);
}

TEST(Gaussian, Smooth) {
  const auto flat = gaussian_smooth(GrayImage(9, 11, 100.0), 2.0);
  for (double v : flat.pixels()) EXPECT_NEAR(v, 100.0, 1e-9);

  GrayImage spike(7, 7);
  spike(3, 3) = 255.0;
  const auto s = gaussian_smooth(spike, 1.0);
  EXPECT_NEAR(std::accumulate(s.pixels().begin(), s.pixels().end(), 0.0), 255.0, 1e-6);

  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto img = oracle::random_image(rng, 1 + t % 7, 5 + t % 3);
    const double sigma = 0.5 + 0.25 * t;
    const auto out = gaussian_smooth(img, sigma);
    EXPECT_LE(oracle::max_abs_diff(out, oracle::conv2d_gaussian(img, sigma)), 1e-9);
    for (std::size_t i = 0; i < out.size(); ++i) {
      EXPECT_GE(out.pixels()[i], img.min() - 1e-9);
      EXPECT_LE(out.pixels()[i], img.max() + 1e-9);
    }
  }
}

TEST(Morphology, DiskSizes) {
  EXPECT_EQ(disk_se(0).size(), 1u);
  EXPECT_EQ(disk_se(1).size(), 5u);
  EXPECT_EQ(disk_se(2).size(), 13u);
  EXPECT_THROW(StructuringElement({{0, 1}, {0, -1}}), InvalidConfig);
  EXPECT_THROW(StructuringElement({{0, 0}, {0, 1}}), InvalidConfig);
}

TEST(Morphology, Examples) {
  const GrayImage flat(6, 8, 42.0);
  EXPECT_EQ(erode(flat, disk_se(2)), flat);
  EXPECT_EQ(dilate(flat, disk_se(2)), flat);
  const auto flat_th = tophat(flat, disk_se(3));
  for (double v : flat_th.pixels()) EXPECT_EQ(v, 0.0);

  GrayImage spike(9, 9);
  spike(4, 4) = 255.0;
  const auto d = dilate(spike, disk_se(1));
  EXPECT_EQ(std::count(d.pixels().begin(), d.pixels().end(), 255.0), 5);

  GrayImage plateau(21, 21, 50.0);
  for (int r = 9; r < 12; ++r)
    for (int c = 9; c < 12; ++c) plateau(r, c) = 200.0;
  const auto th = tophat(plateau, disk_se(5));
  for (int r = 0; r < 21; ++r) {
    for (int c = 0; c < 21; ++c) {
      const bool inside = r >= 9 && r < 12 && c >= 9 && c < 12;
      EXPECT_EQ(th(r, c), inside ? 150.0 : 0.0);
    }
  }
}

TEST(Morphology, MatchesNaiveOracle) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 60; ++t) {
    const int h = 1 + static_cast<int>(rng() % 30), w = 1 + static_cast<int>(rng() % 30);
    const int radius = static_cast<int>(rng() % 9);
    const auto img = oracle::random_image(rng, h, w, t % 2 == 0);
    const auto se = disk_se(radius);
    const auto dsk = oracle::disk(radius);
    EXPECT_EQ(erode(img, se), oracle::naive_morph(img, dsk, false)) << h << "x" << w << " r=" << radius;
    EXPECT_EQ(dilate(img, se), oracle::naive_morph(img, dsk, true)) << h << "x" << w << " r=" << radius;
  }
}

TEST(Morphology, NonDiskElement) {
  // A symmetric cross with a gap, exercising several runs per row.
  const StructuringElement se({{0, 0}, {0, 3}, {0, -3}, {0, 1}, {0, -1}, {2, 2}, {-2, -2}, {1, 0}, {-1, 0}});
  std::vector<oracle::Off> off;
  for (const auto& o : se.offsets()) off.push_back({o.dr, o.dc});
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const auto img = oracle::random_image(rng, 3 + t, 12 - t % 5);
    EXPECT_EQ(erode(img, se), oracle::naive_morph(img, off, false));
    EXPECT_EQ(dilate(img, se), oracle::naive_morph(img, off, true));
  }
}

TEST(Morphology, Laws) {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 40; ++t) {
    const auto img = oracle::random_image(rng, 5 + t % 17, 4 + t % 13, true);
    const auto se = disk_se(t % 11);
    const auto op = opening(img, se);
    EXPECT_EQ(opening(op, se), op);
    const auto th = tophat(img, se);
    for (std::size_t i = 0; i < img.size(); ++i) {
      EXPECT_LE(op.pixels()[i], img.pixels()[i]);
      EXPECT_GE(th.pixels()[i], 0.0);
    }
    // erode(-x) == -dilate(x)
    GrayImage neg = img;
    for (double& v : neg.pixels()) v = -v;
    const auto e = erode(neg, se);
    const auto d = dilate(img, se);
    for (std::size_t i = 0; i < img.size(); ++i) EXPECT_EQ(e.pixels()[i], -d.pixels()[i]);
  }
}

TEST(Stretch, Examples) {
  GrayImage ramp(1, 256);
  for (int c = 0; c < 256; ++c) ramp(0, c) = c;
  EXPECT_LE(oracle::max_abs_diff(contrast_stretch(ramp, 0, 100), ramp), 1e-9);
  const GrayImage flat(3, 3, 9.0);
  EXPECT_EQ(contrast_stretch(flat, 1, 99), flat);
  const auto s = contrast_stretch(GrayImage::from_rows({{50, 75, 100}}), 0, 100);
  EXPECT_EQ(s, GrayImage::from_rows({{0, 127.5, 255}}));
  EXPECT_EQ(percentile_nearest_rank({5, 1, 3, 2, 4}, 40), 2.0);
  EXPECT_EQ(percentile_nearest_rank({5, 1, 3, 2, 4}, 0), 1.0);
}

TEST(Stretch, Monotone) {
  std::mt19937_64 rng(31);
  const auto img = oracle::random_image(rng, 20, 20);
  const auto out = contrast_stretch(img, 5, 95);
  std::vector<std::size_t> idx(img.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return img.pixels()[a] < img.pixels()[b]; });
  for (std::size_t i = 1; i < idx.size(); ++i) EXPECT_LE(out.pixels()[idx[i - 1]], out.pixels()[idx[i]]);
}

TEST(Wavelet, ClosedForms) {
  const auto one = dwt2_forward(GrayImage::from_rows({{1, 1}, {1, 1}}), 1);
  EXPECT_NEAR(one.ll(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(one.details[0].lh(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(one.details[0].hl(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(one.details[0].hh(0, 0), 0.0, 1e-15);

  const double a = 3, b = 8, c = -2, d = 5;
  const auto p = dwt2_forward(GrayImage::from_rows({{a, b}, {c, d}}), 1);
  EXPECT_NEAR(p.ll(0, 0), (a + b + c + d) / 2, 1e-12);
  EXPECT_NEAR(p.details[0].lh(0, 0), (a - b + c - d) / 2, 1e-12);
  EXPECT_NEAR(p.details[0].hl(0, 0), (a + b - c - d) / 2, 1e-12);
  EXPECT_NEAR(p.details[0].hh(0, 0), (a - b - c + d) / 2, 1e-12);

  WaveletPyramid q{GrayImage(1, 1, 2.0), {{GrayImage(1, 1), GrayImage(1, 1), GrayImage(1, 1)}}, 2, 2};
  EXPECT_LE(oracle::max_abs_diff(dwt2_inverse(q), GrayImage(2, 2, 1.0)), 1e-12);
  q.ll = GrayImage(1, 1);
  EXPECT_EQ(dwt2_inverse(q), GrayImage(2, 2));
  q.original_height = 5;
  EXPECT_THROW(dwt2_inverse(q), DimensionMismatch);
}

TEST(Wavelet, ConstantHasNoDetail) {
  const auto p = dwt2_forward(GrayImage(13, 7, 77.0), 3);
  for (const auto& d : p.details)
    for (const GrayImage* b : {&d.lh, &d.hl, &d.hh})
      for (double v : b->pixels()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Wavelet, SubbandDims) {
  const auto p = dwt2_forward(GrayImage(13, 6), 2);
  EXPECT_EQ(p.details[0].lh.height(), 7);
  EXPECT_EQ(p.details[0].lh.width(), 3);
  EXPECT_EQ(p.details[1].hh.height(), 4);
  EXPECT_EQ(p.details[1].hh.width(), 2);
  EXPECT_EQ(p.ll.height(), 4);
}

TEST(Wavelet, PerfectReconstructionAndEnergy) {
  std::mt19937_64 rng(37);
  for (int h = 1; h <= 20; h += 3) {
    for (int w = 1; w <= 20; w += 4) {
      const auto img = oracle::random_image(rng, h, w);
      EXPECT_LE(oracle::max_abs_diff(dwt2_inverse(dwt2_forward(img, 2)), img), 1e-9);
      const auto p = dwt2_forward(img, 1);
      double e = oracle::energy(p.ll);
      for (const GrayImage* b : {&p.details[0].lh, &p.details[0].hl, &p.details[0].hh}) e += oracle::energy(*b);
      const double ref = oracle::padded_energy(img);
      EXPECT_LE(std::abs(e - ref), 1e-9 * ref);
    }
  }
}

TEST(Wavelet, Policies) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 10; ++t) {
    const auto img = oracle::random_image(rng, 3 + 5 * t, 2 + 3 * t);
    EXPECT_LE(oracle::max_abs_diff(denoise_reconstruct(img, 2, KeepAll{}), img), 1e-9);
    EXPECT_LE(oracle::max_abs_diff(denoise_reconstruct(img, 2, SoftThreshold{0.0}),
                                   denoise_reconstruct(img, 2, KeepAll{})), 1e-12);
    for (int levels = 1; levels <= 3; ++levels) {
      EXPECT_LE(oracle::max_abs_diff(denoise_reconstruct(img, levels, ZeroAll{}),
                                     oracle::block_average_reconstruct(img, levels)), 1e-9);
    }
  }
  EXPECT_THROW(denoise_reconstruct(GrayImage(2, 2), 1, SoftThreshold{-1}), InvalidConfig);
}

TEST(Enhance, ConstantGivesZero) {
  const auto out = enhance(GrayImage(64, 64, 123.0));
  for (double v : out.pixels()) EXPECT_EQ(v, 0.0);
}

TEST(Enhance, RangeClamped) {
  std::mt19937_64 rng(43);
  EnhanceConfig cfg;
  cfg.se_radius = 4;
  for (int t = 0; t < 100; ++t) {
    const auto out = enhance(oracle::random_image(rng, 4 + t % 9, 5 + t % 7), cfg);
    EXPECT_GE(out.min(), 0.0);
    EXPECT_LE(out.max(), 255.0);
  }
}

TEST(Enhance, ConfigValidation) {
  EnhanceConfig c;
  c.gaussian_sigma = 0;
  EXPECT_THROW(c.validate(), NonPositiveSigma);
  c = {};
  c.stretch_low = 99;
  c.stretch_high = 1;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = {};
  c.dwt_levels = 0;
  EXPECT_THROW(c.validate(), InvalidConfig);
}

TEST(Enhance, BlobContrastIncreases) {
  PhantomSpec spec;
  spec.height = spec.width = 256;
  spec.noise_std = 3.0;
  spec.seed = 99;
  spec.blobs = {{128, 128, 20, 40}};
  const auto img = generate_phantom(spec).image;
  EnhanceConfig cfg;
  cfg.se_radius = 30;
  const auto out = enhance(img, cfg);
  const auto ratio = [](const GrayImage& g) {
    const double mean = std::accumulate(g.pixels().begin(), g.pixels().end(), 0.0) / g.size();
    return (g.max() - mean) / mean;
  };
  EXPECT_GE(ratio(out), ratio(img));
  // Regression value for this seed and configuration.
  EXPECT_NEAR(ratio(out), 8.5882003838773464, 1e-9);
}
