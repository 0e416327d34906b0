#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pdeblur/image.hpp"

namespace pdeblur {

using Spectrum = std::vector<std::complex<double>>;

/// Real-to-complex 2D DFT of a fixed size, backed by FFTW.
///
/// Forward is unnormalized; inverse scales by 1/(height*width) so that
/// inverse(forward(u)) == u. Spectra are the non-redundant half,
/// height x (width/2 + 1), row-major. Plans are created with
/// FFTW_ESTIMATE so results are reproducible run to run, and transforms
/// may be executed concurrently from several threads.
class Fft2d {
 public:
  Fft2d(std::size_t height, std::size_t width);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t spectrum_width() const noexcept { return width_ / 2 + 1; }
  std::size_t spectrum_size() const noexcept { return height_ * spectrum_width(); }

  Spectrum forward(const ImageGrid& u) const;
  ImageGrid inverse(std::span<const std::complex<double>> spectrum) const;

 private:
  struct Plans;
  std::size_t height_;
  std::size_t width_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace pdeblur
