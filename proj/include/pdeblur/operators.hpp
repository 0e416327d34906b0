#pragma once

#include <cstddef>
#include <vector>

#include "pdeblur/fft.hpp"
#include "pdeblur/image.hpp"

namespace pdeblur {

// Periodic forward differences and their adjoints.
//   grad_x(u)[i,j] = u[i, j+1] - u[i, j]      (columns wrap)
//   grad_y(u)[i,j] = u[i+1, j] - u[i, j]      (rows wrap)
ImageGrid grad_x(const ImageGrid& u);
ImageGrid grad_y(const ImageGrid& u);
ImageGrid grad_x_adjoint(const ImageGrid& v);
ImageGrid grad_y_adjoint(const ImageGrid& w);
/// Five-point periodic Laplacian, equal to -(grad_x^T grad_x + grad_y^T grad_y).
ImageGrid laplacian(const ImageGrid& u);

/// Blur kernel: nonnegative taps summing to one, odd extents, anchored at
/// the center tap.
class Psf {
 public:
  Psf(std::size_t kheight, std::size_t kwidth, std::vector<double> weights);

  static Psf identity() { return Psf(1, 1, {1.0}); }

  std::size_t kheight() const noexcept { return kheight_; }
  std::size_t kwidth() const noexcept { return kwidth_; }
  std::size_t anchor_row() const noexcept { return kheight_ / 2; }
  std::size_t anchor_col() const noexcept { return kwidth_ / 2; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return weights_[r * kwidth_ + c]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  bool is_identity() const noexcept { return kheight_ == 1 && kwidth_ == 1; }

 private:
  std::size_t kheight_;
  std::size_t kwidth_;
  std::vector<double> weights_;
};

/// Linear motion kernel with MATLAB fspecial('motion', length, angle)
/// semantics: a one-pixel-wide segment through the center, with taps
/// weighted by their coverage of the segment.
Psf make_motion_psf(double length, double angle_degrees);

/// (2*radius+1)^2 sampled Gaussian, normalized to unit sum.
Psf make_gaussian_psf(int radius, double sigma);

/// Circular convolution, computed in the frequency domain.
ImageGrid convolve_periodic(const ImageGrid& u, const Psf& psf);
/// Circular convolution by direct summation over the kernel taps.
ImageGrid convolve_periodic_direct(const ImageGrid& u, const Psf& psf);

/// The blur operator A and its adjoint A* for a fixed image size.
class BlurOperator {
 public:
  BlurOperator(const Psf& psf, std::size_t height, std::size_t width);

  ImageGrid apply(const ImageGrid& u) const;
  ImageGrid apply_adjoint(const ImageGrid& u) const;

  const Psf& psf() const noexcept { return psf_; }
  const Fft2d& fft() const noexcept { return fft_; }
  /// DFT of the zero-padded PSF with its anchor moved to index (0, 0).
  const Spectrum& transfer() const noexcept { return transfer_; }
  std::size_t height() const noexcept { return fft_.height(); }
  std::size_t width() const noexcept { return fft_.width(); }

 private:
  Psf psf_;
  Fft2d fft_;
  Spectrum transfer_;
};

/// Frequency-domain form of gamma3*A*A - (mu + gamma1)*Laplacian, the
/// normal operator of the u-subproblem. Immutable once built.
class SpectralKernel {
 public:
  const BlurOperator& blur() const noexcept { return blur_; }
  std::size_t height() const noexcept { return blur_.height(); }
  std::size_t width() const noexcept { return blur_.width(); }
  const Spectrum& transfer() const noexcept { return blur_.transfer(); }
  const Spectrum& grad_x_symbol() const noexcept { return grad_x_symbol_; }
  const Spectrum& grad_y_symbol() const noexcept { return grad_y_symbol_; }
  const std::vector<double>& denom() const noexcept { return denom_; }
  double mu() const noexcept { return mu_; }
  double gamma1() const noexcept { return gamma1_; }
  double gamma3() const noexcept { return gamma3_; }

  /// Applies the operator through the frequency domain.
  ImageGrid apply(const ImageGrid& u) const;

 private:
  friend SpectralKernel build_spectral_kernel(const Psf&, std::size_t, std::size_t, double, double, double);
  SpectralKernel(BlurOperator blur, double mu, double gamma1, double gamma3);

  BlurOperator blur_;
  double mu_;
  double gamma1_;
  double gamma3_;
  Spectrum grad_x_symbol_;
  Spectrum grad_y_symbol_;
  std::vector<double> denom_;
};

SpectralKernel build_spectral_kernel(const Psf& psf, std::size_t height, std::size_t width,
                                     double mu, double gamma1, double gamma3);

/// Exact periodic solve of (gamma3*A*A - (mu+gamma1)*Laplacian) u = rhs.
ImageGrid solve_u_system(const SpectralKernel& kernel, const ImageGrid& rhs);

}  // namespace pdeblur
