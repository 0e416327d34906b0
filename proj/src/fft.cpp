#include "pdeblur/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "pdeblur/error.hpp"

namespace pdeblur {

namespace {
// FFTW planner calls are not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft2d::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  Plans(std::size_t h, std::size_t w) {
    const int ih = static_cast<int>(h);
    const int iw = static_cast<int>(w);
    // Planning with FFTW_ESTIMATE does not touch the arrays' contents.
    double* real = fftw_alloc_real(h * w);
    fftw_complex* cplx = fftw_alloc_complex(h * (w / 2 + 1));
    {
      std::lock_guard lock(planner_mutex());
      r2c = fftw_plan_dft_r2c_2d(ih, iw, real, cplx, FFTW_ESTIMATE | FFTW_UNALIGNED);
      c2r = fftw_plan_dft_c2r_2d(ih, iw, cplx, real, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_free(real);
    fftw_free(cplx);
    if (!r2c || !c2r) throw std::runtime_error("FFTW plan creation failed");
  }

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
  }

  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

Fft2d::Fft2d(std::size_t height, std::size_t width)
    : height_(height), width_(width) {
  if (height == 0 || width == 0) throw InputError("FFT size must be positive");
  plans_ = std::make_shared<const Plans>(height, width);
}

Spectrum Fft2d::forward(const ImageGrid& u) const {
  if (u.height() != height_ || u.width() != width_)
    throw InputError("FFT: image dimensions do not match the transform");
  // r2c leaves its input intact, but FFTW's signature is non-const.
  std::vector<double> in(u.values());
  Spectrum out(spectrum_size());
  fftw_execute_dft_r2c(plans_->r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

ImageGrid Fft2d::inverse(std::span<const std::complex<double>> spectrum) const {
  if (spectrum.size() != spectrum_size()) throw InputError("FFT: spectrum size mismatch");
  // c2r overwrites its input
  Spectrum in(spectrum.begin(), spectrum.end());
  std::vector<double> out(height_ * width_);
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / static_cast<double>(height_ * width_);
  for (double& v : out) v *= scale;
  return ImageGrid(height_, width_, std::move(out));
}

}  // namespace pdeblur
