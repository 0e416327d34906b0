#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pdeblur/degradation.hpp"
#include "pdeblur/error.hpp"
#include "pdeblur/metrics.hpp"

using namespace pdeblur;

namespace {

double mean_of(const ImageGrid& g) {
  double s = 0.0;
  for (double v : g.values()) s += v;
  return s / double(g.size());
}

double variance_of(const ImageGrid& g) {
  const double m = mean_of(g);
  double s = 0.0;
  for (double v : g.values()) s += (v - m) * (v - m);
  return s / double(g.size() - 1);
}

}  // namespace

TEST(ParseBlur, Accepted) {
  EXPECT_EQ(parse_blur("none"), BlurSpec(NoBlur{}));
  EXPECT_EQ(parse_blur("motion:10:90"), BlurSpec(MotionBlur{10, 90}));
  EXPECT_EQ(parse_blur("gaussian:3:3"), BlurSpec(GaussianBlur{3, 3.0}));
  EXPECT_EQ(parse_blur("gaussian:2:1.5"), BlurSpec(GaussianBlur{2, 1.5}));
  for (const char* s : {"none", "motion:10:90", "gaussian:3:3"}) EXPECT_EQ(parse_blur(to_string(parse_blur(s))), parse_blur(s));
}

TEST(ParseBlur, Rejected) {
  for (const char* s : {"", "motion", "motion:10", "motion:x:90", "motion:10:90:1", "gaussian:3", "gaussian:-1:3",
                        "gaussian:3:0", "gaussian:1.5:2", "box:3:3", "motion:0:0"}) {
    EXPECT_THROW(make_psf(parse_blur(s)), InputError) << s;
  }
}

TEST(SplitMix64, Deterministic) {
  SplitMix64 a(123), b(123), c(124);
  for (int k = 0; k < 10; ++k) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  SplitMix64 r(9);
  for (int k = 0; k < 1000; ++k) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(PoissonNoise, ZeroStaysZeroAndSeedsReproduce) {
  const ImageGrid zero(16, 16, 0.0);
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) EXPECT_EQ(add_poisson_noise(zero, 255, seed), zero);

  const ImageGrid img = make_synthetic(64);
  const ImageGrid a = add_poisson_noise(img, 255, 7);
  EXPECT_EQ(a, add_poisson_noise(img, 255, 7));
  EXPECT_NE(a, add_poisson_noise(img, 255, 8));
  for (double v : a.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_EQ(v, std::floor(v));
  }
}

TEST(PoissonNoise, ConstantImageMoments) {
  const ImageGrid c(256, 256, 100.0);
  const ImageGrid n = add_poisson_noise(c, 255, 2024);
  const double count = double(n.size());
  EXPECT_NEAR(mean_of(n), 100.0, 3.0 * 10.0 / 256.0);
  // sd of the sample variance for Poisson(100): sqrt((2*100^2 + 100)/N)
  EXPECT_NEAR(variance_of(n), 100.0, 3.0 * std::sqrt((2.0 * 100 * 100 + 100) / count));
}

TEST(PoissonNoise, SmallMeanMoments) {
  const ImageGrid c(256, 256, 3.0);
  const ImageGrid n = add_poisson_noise(c, 255, 5);
  EXPECT_NEAR(mean_of(n), 3.0, 3.0 * std::sqrt(3.0 / double(n.size())));
  EXPECT_NEAR(variance_of(n), 3.0, 4.0 * std::sqrt((2.0 * 9 + 3) / double(n.size())));
}

TEST(PoissonNoise, UnbiasedAcrossSeeds) {
  for (double level : {0.4, 7.3, 42.0, 180.0}) {
    const ImageGrid c(4, 4, level);
    double sum = 0.0;
    const int seeds = 1500;
    for (int s = 0; s < seeds; ++s) sum += mean_of(add_poisson_noise(c, 255, std::uint64_t(s)));
    const double samples = seeds * 16.0;
    EXPECT_NEAR(sum / seeds, level, 3.0 * std::sqrt(level / samples)) << level;
  }
}

TEST(PoissonNoise, PeakRescaling) {
  // peak 10 means out = Poisson(v * 10/255) * 255/10: still unbiased, much noisier
  const ImageGrid c(128, 128, 120.0);
  const ImageGrid n = add_poisson_noise(c, 10, 3);
  const double lam = 120.0 * 10.0 / 255.0, scale = 255.0 / 10.0;
  EXPECT_NEAR(mean_of(n), 120.0, 4.0 * scale * std::sqrt(lam / double(n.size())));
  EXPECT_NEAR(variance_of(n), scale * scale * lam, 0.05 * scale * scale * lam);
}

TEST(PoissonNoise, SamplerMatchesPmf) {
  // frequency of the mode against the exact pmf, both sampler branches
  for (double mean : {4.0, 55.0}) {
    SplitMix64 rng(77);
    const int draws = 200000;
    const auto mode = std::uint64_t(std::floor(mean));
    int hits = 0;
    for (int k = 0; k < draws; ++k) hits += sample_poisson(mean, rng) == mode;
    const double pmf = std::exp(double(mode) * std::log(mean) - mean - std::lgamma(double(mode) + 1.0));
    EXPECT_NEAR(double(hits) / draws, pmf, 4.0 * std::sqrt(pmf * (1 - pmf) / draws)) << mean;
  }
}

TEST(PoissonNoise, InvalidInput) {
  ImageGrid g(4, 4, 10.0);
  g(1, 1) = -0.5;
  EXPECT_THROW(add_poisson_noise(g, 255, 0), InputError);
  EXPECT_THROW(add_poisson_noise(ImageGrid(4, 4, 1.0), 0.0, 0), InputError);
  EXPECT_THROW(add_poisson_noise(ImageGrid(4, 4, 1.0), -3.0, 0), InputError);
}

TEST(Degrade, HighPeakIsNearlyClean) {
  const ImageGrid clean = make_synthetic(64);
  const ImageGrid out = degrade(clean, {NoBlur{}, 1e9, 1});
  EXPECT_LT(norm2(out - clean) / norm2(clean), 1e-3);
}

TEST(Degrade, InfinitePeakIsBlurOnly) {
  const ImageGrid clean = make_synthetic(64);
  const double inf = std::numeric_limits<double>::infinity();
  const ImageGrid out = degrade(clean, {GaussianBlur{3, 3.0}, inf, 1});
  const ImageGrid expected = convolve_periodic(clean, make_gaussian_psf(3, 3.0));
  double m = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) m = std::max(m, std::abs(out[k] - expected[k]));
  EXPECT_LT(m, 1e-9);
  EXPECT_EQ(degrade(clean, {NoBlur{}, inf, 1}), clean);
}

TEST(Degrade, NoiseLowersQualityOfBlurredImage) {
  const ImageGrid clean = make_synthetic(128);
  const double inf = std::numeric_limits<double>::infinity();
  const ImageGrid blurred = degrade(clean, {MotionBlur{10, 90}, inf, 0});
  const ImageGrid observed = degrade(clean, {MotionBlur{10, 90}, 255, 0});
  EXPECT_LT(psnr(observed, clean), psnr(blurred, clean));
  EXPECT_LT(psnr(blurred, clean), 40.0);
}
