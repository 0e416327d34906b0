#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "pdeblur/image.hpp"
#include "pdeblur/operators.hpp"

namespace pdeblur {

struct NoBlur {
  friend bool operator==(const NoBlur&, const NoBlur&) = default;
};

struct MotionBlur {
  double length = 10.0;
  double angle = 90.0;
  friend bool operator==(const MotionBlur&, const MotionBlur&) = default;
};

struct GaussianBlur {
  int radius = 3;
  double sigma = 3.0;
  friend bool operator==(const GaussianBlur&, const GaussianBlur&) = default;
};

using BlurSpec = std::variant<NoBlur, MotionBlur, GaussianBlur>;

/// Parses "none", "motion:LEN:ANGLE" or "gaussian:RADIUS:SIGMA".
BlurSpec parse_blur(std::string_view text);
std::string to_string(const BlurSpec& blur);
/// Identity kernel for NoBlur.
Psf make_psf(const BlurSpec& blur);

struct DegradationSpec {
  BlurSpec blur = NoBlur{};
  /// Photon count that maps to intensity 255; 255 uses pixel values as
  /// Poisson means directly. +infinity disables the noise stage.
  double noise_peak = 255.0;
  std::uint64_t seed = 0;
};

/// SplitMix64. Pixel k of an image draws from its own stream, started at
/// mix64(seed ^ mix64(k + 1)), so sampling order does not affect results.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  std::uint64_t next() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;

  static std::uint64_t mix64(std::uint64_t z) noexcept;
  static SplitMix64 for_pixel(std::uint64_t seed, std::uint64_t index) noexcept;

 private:
  std::uint64_t state_;
};

/// Poisson(mean) draw: sequential-search inversion below mean 30,
/// transformed rejection (PTRS) above.
std::uint64_t sample_poisson(double mean, SplitMix64& rng);

/// out = Poisson(clean * peak/255) * 255/peak, per pixel.
ImageGrid add_poisson_noise(const ImageGrid& clean, double peak, std::uint64_t seed);

/// Blur, then Poisson noise.
ImageGrid degrade(const ImageGrid& clean, const DegradationSpec& spec);

}  // namespace pdeblur
