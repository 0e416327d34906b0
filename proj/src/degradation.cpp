#include "pdeblur/degradation.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "pdeblur/error.hpp"

namespace pdeblur {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view tok, std::string_view context) {
  T value{};
  const auto* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (tok.empty() || ec != std::errc{} || ptr != end)
    throw InputError("bad number '" + std::string(tok) + "' in blur spec '" + std::string(context) + "'");
  return value;
}

}  // namespace

BlurSpec parse_blur(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1 && parts[0] == "none") return NoBlur{};
  if (parts.size() == 3 && parts[0] == "motion") {
    MotionBlur m{parse_number<double>(parts[1], text), parse_number<double>(parts[2], text)};
    if (!(m.length >= 1.0)) throw InputError("motion blur length must be >= 1");
    return m;
  }
  if (parts.size() == 3 && parts[0] == "gaussian") {
    GaussianBlur g{parse_number<int>(parts[1], text), parse_number<double>(parts[2], text)};
    if (g.radius < 0) throw InputError("gaussian radius must be >= 0");
    if (!(g.sigma > 0.0)) throw InputError("gaussian sigma must be positive");
    return g;
  }
  throw InputError("bad blur spec '" + std::string(text) +
                   "' (expected none, motion:LEN:ANGLE or gaussian:RADIUS:SIGMA)");
}

std::string to_string(const BlurSpec& blur) {
  std::ostringstream os;
  if (const auto* m = std::get_if<MotionBlur>(&blur)) {
    os << "motion:" << m->length << ':' << m->angle;
  } else if (const auto* g = std::get_if<GaussianBlur>(&blur)) {
    os << "gaussian:" << g->radius << ':' << g->sigma;
  } else {
    os << "none";
  }
  return os.str();
}

Psf make_psf(const BlurSpec& blur) {
  if (const auto* m = std::get_if<MotionBlur>(&blur)) return make_motion_psf(m->length, m->angle);
  if (const auto* g = std::get_if<GaussianBlur>(&blur)) return make_gaussian_psf(g->radius, g->sigma);
  return Psf::identity();
}

std::uint64_t SplitMix64::mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() noexcept {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

double SplitMix64::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

SplitMix64 SplitMix64::for_pixel(std::uint64_t seed, std::uint64_t index) noexcept {
  return SplitMix64(mix64(seed ^ mix64(index + 1)));
}

std::uint64_t sample_poisson(double mean, SplitMix64& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw InputError("Poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;

  if (mean < 30.0) {
    const double u = rng.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    // the cap only matters when u lands in the last ~1e-16 of the tail
    while (u > cdf && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }

  // Hoermann (1993), transformed rejection with squeeze.
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0))
      return static_cast<std::uint64_t>(k);
  }
}

ImageGrid add_poisson_noise(const ImageGrid& clean, double peak, std::uint64_t seed) {
  clean.validate();
  if (!(peak > 0.0)) throw InputError("noise peak must be > 0");
  for (double v : clean.values())
    if (v < 0.0) throw InputError("Poisson noise requires nonnegative pixels");
  if (std::isinf(peak)) return clean;

  const double to_counts = peak / 255.0;
  const double to_intensity = 255.0 / peak;
  ImageGrid out(clean.height(), clean.width());
  for (std::size_t k = 0; k < clean.size(); ++k) {
    SplitMix64 rng = SplitMix64::for_pixel(seed, k);
    out[k] = static_cast<double>(sample_poisson(clean[k] * to_counts, rng)) * to_intensity;
  }
  return out;
}

ImageGrid degrade(const ImageGrid& clean, const DegradationSpec& spec) {
  clean.validate();
  for (double v : clean.values())
    if (v < 0.0) throw InputError("degrade requires nonnegative pixels");
  ImageGrid blurred = clean;
  if (!std::holds_alternative<NoBlur>(spec.blur)) {
    blurred = convolve_periodic(clean, make_psf(spec.blur));
    // FFT round-off can leave -1e-14 where the image is zero
    for (double& v : blurred.data()) v = std::max(v, 0.0);
  }
  return add_poisson_noise(blurred, spec.noise_peak, spec.seed);
}

}  // namespace pdeblur
