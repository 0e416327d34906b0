#include "pdeblur/operators.hpp"

#include <cfloat>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "pdeblur/error.hpp"

namespace pdeblur {

ImageGrid grad_x(const ImageGrid& u) {
  const std::size_t h = u.height(), w = u.width();
  ImageGrid out(h, w);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) out(i, j) = u(i, j + 1 == w ? 0 : j + 1) - u(i, j);
  return out;
}

ImageGrid grad_y(const ImageGrid& u) {
  const std::size_t h = u.height(), w = u.width();
  ImageGrid out(h, w);
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t next = i + 1 == h ? 0 : i + 1;
    for (std::size_t j = 0; j < w; ++j) out(i, j) = u(next, j) - u(i, j);
  }
  return out;
}

ImageGrid grad_x_adjoint(const ImageGrid& v) {
  const std::size_t h = v.height(), w = v.width();
  ImageGrid out(h, w);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) out(i, j) = v(i, j == 0 ? w - 1 : j - 1) - v(i, j);
  return out;
}

ImageGrid grad_y_adjoint(const ImageGrid& w_field) {
  const std::size_t h = w_field.height(), w = w_field.width();
  ImageGrid out(h, w);
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t prev = i == 0 ? h - 1 : i - 1;
    for (std::size_t j = 0; j < w; ++j) out(i, j) = w_field(prev, j) - w_field(i, j);
  }
  return out;
}

ImageGrid laplacian(const ImageGrid& u) {
  const std::size_t h = u.height(), w = u.width();
  ImageGrid out(h, w);
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t up = i == 0 ? h - 1 : i - 1;
    const std::size_t down = i + 1 == h ? 0 : i + 1;
    for (std::size_t j = 0; j < w; ++j) {
      const std::size_t left = j == 0 ? w - 1 : j - 1;
      const std::size_t right = j + 1 == w ? 0 : j + 1;
      out(i, j) = u(up, j) + u(down, j) + u(i, left) + u(i, right) - 4.0 * u(i, j);
    }
  }
  return out;
}

Psf::Psf(std::size_t kheight, std::size_t kwidth, std::vector<double> weights)
    : kheight_(kheight), kwidth_(kwidth), weights_(std::move(weights)) {
  if (kheight_ % 2 == 0 || kwidth_ % 2 == 0) throw InputError("PSF extents must be odd");
  if (weights_.size() != kheight_ * kwidth_) throw InputError("PSF weight count mismatch");
  double sum = 0.0;
  for (double v : weights_) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("PSF weights must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InputError("PSF weights must sum to 1");
}

namespace {

Psf normalized(std::size_t kh, std::size_t kw, std::vector<double> taps) {
  const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (double& v : taps) v /= sum;
  return Psf(kh, kw, std::move(taps));
}

}  // namespace

Psf make_motion_psf(double length, double angle_degrees) {
  if (!(length >= 1.0)) throw InputError("motion blur length must be >= 1");
  if (!std::isfinite(angle_degrees)) throw InputError("motion blur angle must be finite");

  constexpr double eps = DBL_EPSILON;
  constexpr double line_width = 1.0;
  const double half = (length - 1.0) / 2.0;
  double phi_deg = std::fmod(angle_degrees, 180.0);
  if (phi_deg < 0.0) phi_deg += 180.0;
  const double phi = phi_deg / 180.0 * std::numbers::pi;
  const double cosphi = std::cos(phi);
  const double sinphi = std::sin(phi);
  const double xsign = cosphi < 0.0 ? -1.0 : 1.0;

  // Quarter grid x = 0, xsign, ..., sx and y = 0, ..., sy.
  const long sx = static_cast<long>(std::trunc(half * cosphi + line_width * xsign - length * eps));
  const long sy = static_cast<long>(std::trunc(half * sinphi + line_width - length * eps));
  const std::size_t nx = static_cast<std::size_t>(std::labs(sx)) + 1;
  const std::size_t ny = static_cast<std::size_t>(sy) + 1;

  std::vector<double> quarter(ny * nx);
  for (std::size_t r = 0; r < ny; ++r) {
    for (std::size_t c = 0; c < nx; ++c) {
      const double x = xsign * static_cast<double>(c);
      const double y = static_cast<double>(r);
      double dist = y * cosphi - x * sinphi;
      const double rad = std::hypot(x, y);
      if (rad >= half && std::abs(dist) <= line_width) {
        // beyond the end point: distance to the end point along the line
        const double along = half - std::abs((x + dist * sinphi) / cosphi);
        dist = std::sqrt(dist * dist + along * along);
      }
      quarter[r * nx + c] = std::max(line_width + eps - std::abs(dist), 0.0);
    }
  }

  // Unfold: the quarter grid fills the lower-right block, its 180-degree
  // rotation the upper-left block; they share the center tap.
  const std::size_t kh = 2 * ny - 1;
  const std::size_t kw = 2 * nx - 1;
  std::vector<double> taps(kh * kw, 0.0);
  for (std::size_t r = 0; r < ny; ++r) {
    for (std::size_t c = 0; c < nx; ++c) {
      taps[(ny - 1 - r) * kw + (nx - 1 - c)] = quarter[r * nx + c];
      taps[(ny - 1 + r) * kw + (nx - 1 + c)] = quarter[r * nx + c];
    }
  }
  if (cosphi > 0.0) {
    for (std::size_t r = 0; r < kh / 2; ++r)
      for (std::size_t c = 0; c < kw; ++c) std::swap(taps[r * kw + c], taps[(kh - 1 - r) * kw + c]);
  }
  return normalized(kh, kw, std::move(taps));
}

Psf make_gaussian_psf(int radius, double sigma) {
  if (radius < 0) throw InputError("gaussian radius must be >= 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("gaussian sigma must be positive");
  const std::size_t n = 2 * static_cast<std::size_t>(radius) + 1;
  std::vector<double> taps(n * n);
  for (int y = -radius; y <= radius; ++y)
    for (int x = -radius; x <= radius; ++x)
      taps[static_cast<std::size_t>(y + radius) * n + static_cast<std::size_t>(x + radius)] =
          std::exp(-static_cast<double>(x * x + y * y) / (2.0 * sigma * sigma));
  return normalized(n, n, std::move(taps));
}

namespace {

void check_fits(const ImageGrid& u, const Psf& psf) {
  if (psf.kheight() > u.height() || psf.kwidth() > u.width())
    throw InputError("PSF (" + std::to_string(psf.kheight()) + "x" + std::to_string(psf.kwidth()) +
                     ") is larger than the image (" + std::to_string(u.height()) + "x" +
                     std::to_string(u.width()) + ")");
}

}  // namespace

ImageGrid convolve_periodic_direct(const ImageGrid& u, const Psf& psf) {
  check_fits(u, psf);
  const long h = static_cast<long>(u.height()), w = static_cast<long>(u.width());
  const long ch = static_cast<long>(psf.anchor_row()), cw = static_cast<long>(psf.anchor_col());
  ImageGrid out(u.height(), u.width());
  for (long i = 0; i < h; ++i) {
    for (long j = 0; j < w; ++j) {
      double acc = 0.0;
      for (long a = 0; a < static_cast<long>(psf.kheight()); ++a) {
        const long si = ((i - (a - ch)) % h + h) % h;
        for (long b = 0; b < static_cast<long>(psf.kwidth()); ++b) {
          const long sj = ((j - (b - cw)) % w + w) % w;
          acc += psf(a, b) * u(si, sj);
        }
      }
      out(i, j) = acc;
    }
  }
  return out;
}

ImageGrid convolve_periodic(const ImageGrid& u, const Psf& psf) {
  check_fits(u, psf);
  return BlurOperator(psf, u.height(), u.width()).apply(u);
}

BlurOperator::BlurOperator(const Psf& psf, std::size_t height, std::size_t width)
    : psf_(psf), fft_(height, width) {
  if (psf.kheight() > height || psf.kwidth() > width)
    throw InputError("PSF is larger than the image");
  ImageGrid padded(height, width);
  const std::size_t ch = psf.anchor_row(), cw = psf.anchor_col();
  for (std::size_t a = 0; a < psf.kheight(); ++a)
    for (std::size_t b = 0; b < psf.kwidth(); ++b)
      padded((a + height - ch) % height, (b + width - cw) % width) = psf(a, b);
  transfer_ = fft_.forward(padded);
}

ImageGrid BlurOperator::apply(const ImageGrid& u) const {
  if (psf_.is_identity()) return u;
  Spectrum s = fft_.forward(u);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] *= transfer_[k];
  return fft_.inverse(s);
}

ImageGrid BlurOperator::apply_adjoint(const ImageGrid& u) const {
  if (psf_.is_identity()) return u;
  Spectrum s = fft_.forward(u);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] *= std::conj(transfer_[k]);
  return fft_.inverse(s);
}

SpectralKernel::SpectralKernel(BlurOperator blur, double mu, double gamma1, double gamma3)
    : blur_(std::move(blur)), mu_(mu), gamma1_(gamma1), gamma3_(gamma3) {
  const std::size_t h = blur_.height(), w = blur_.width();
  const std::size_t sw = blur_.fft().spectrum_width();
  grad_x_symbol_.resize(h * sw);
  grad_y_symbol_.resize(h * sw);
  denom_.resize(h * sw);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k < h; ++k) {
    const std::complex<double> gy =
        std::polar(1.0, two_pi * static_cast<double>(k) / static_cast<double>(h)) - 1.0;
    for (std::size_t l = 0; l < sw; ++l) {
      const std::complex<double> gx =
          std::polar(1.0, two_pi * static_cast<double>(l) / static_cast<double>(w)) - 1.0;
      const std::size_t idx = k * sw + l;
      grad_x_symbol_[idx] = gx;
      grad_y_symbol_[idx] = gy;
      denom_[idx] = gamma3_ * std::norm(blur_.transfer()[idx]) + (mu_ + gamma1_) * (std::norm(gx) + std::norm(gy));
    }
  }
}

ImageGrid SpectralKernel::apply(const ImageGrid& u) const {
  Spectrum s = blur_.fft().forward(u);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] *= denom_[k];
  return blur_.fft().inverse(s);
}

SpectralKernel build_spectral_kernel(const Psf& psf, std::size_t height, std::size_t width,
                                     double mu, double gamma1, double gamma3) {
  if (!(gamma3 > 0.0)) throw InputError("gamma3 must be > 0");
  if (!(gamma1 > 0.0)) throw InputError("gamma1 must be > 0");
  if (!(mu >= 0.0)) throw InputError("mu must be >= 0");
  return SpectralKernel(BlurOperator(psf, height, width), mu, gamma1, gamma3);
}

ImageGrid solve_u_system(const SpectralKernel& kernel, const ImageGrid& rhs) {
  if (rhs.height() != kernel.height() || rhs.width() != kernel.width())
    throw InputError("solve_u_system: rhs dimensions do not match the kernel");
  Spectrum s = kernel.blur().fft().forward(rhs);
  const auto& denom = kernel.denom();
  for (std::size_t k = 0; k < s.size(); ++k) s[k] /= denom[k];
  return kernel.blur().fft().inverse(s);
}

}  // namespace pdeblur
