#include "pdeblur/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "pdeblur/error.hpp"

namespace pdeblur {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

void check_pair(const ImageGrid& u, const ImageGrid& ref) {
  if (!u.same_shape(ref)) throw InputError("image dimensions differ");
  if (u.empty()) throw InputError("empty image");
}

double squared_error(const ImageGrid& u, const ImageGrid& ref) {
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u[k] - ref[k];
    acc += d * d;
  }
  return acc;
}

std::vector<double> gaussian_window_1d() {
  std::vector<double> g(kWindow);
  double sum = 0.0;
  for (int k = 0; k < kWindow; ++k) {
    const double x = k - kWindow / 2;
    g[k] = std::exp(-x * x / (2.0 * kWindowSigma * kWindowSigma));
    sum += g[k];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Separable 'valid' filtering: output is (h-10) x (w-10).
std::vector<double> filter_valid(const std::vector<double>& in, std::size_t h, std::size_t w,
                                 const std::vector<double>& g) {
  const std::size_t oh = h - kWindow + 1, ow = w - kWindow + 1;
  std::vector<double> rows(h * ow);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < ow; ++j) {
      double acc = 0.0;
      for (int b = 0; b < kWindow; ++b) acc += g[b] * in[i * w + j + b];
      rows[i * ow + j] = acc;
    }
  std::vector<double> out(oh * ow);
  for (std::size_t i = 0; i < oh; ++i)
    for (std::size_t j = 0; j < ow; ++j) {
      double acc = 0.0;
      for (int a = 0; a < kWindow; ++a) acc += g[a] * rows[(i + a) * ow + j];
      out[i * ow + j] = acc;
    }
  return out;
}

double ssim_index(double mu_u, double mu_r, double var_u, double var_r, double cov) {
  return ((2.0 * mu_u * mu_r + kC1) * (2.0 * cov + kC2)) /
         ((mu_u * mu_u + mu_r * mu_r + kC1) * (var_u + var_r + kC2));
}

}  // namespace

double psnr(const ImageGrid& u, const ImageGrid& ref) {
  check_pair(u, ref);
  const double mse = squared_error(u, ref) / static_cast<double>(u.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double snr(const ImageGrid& u, const ImageGrid& ref) {
  check_pair(u, ref);
  const double err = std::sqrt(squared_error(u, ref));
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  const double signal = norm2(ref);
  if (signal == 0.0) throw InputError("SNR undefined for an all-zero reference");
  return 20.0 * std::log10(signal / err);
}

double ssim(const ImageGrid& u, const ImageGrid& ref, SsimMode mode) {
  check_pair(u, ref);
  const std::size_t n = u.size();

  if (mode == SsimMode::Global) {
    double mu_u = 0.0, mu_r = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      mu_u += u[k];
      mu_r += ref[k];
    }
    mu_u /= static_cast<double>(n);
    mu_r /= static_cast<double>(n);
    double var_u = 0.0, var_r = 0.0, cov = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double du = u[k] - mu_u, dr = ref[k] - mu_r;
      var_u += du * du;
      var_r += dr * dr;
      cov += du * dr;
    }
    const double inv = 1.0 / static_cast<double>(n);
    return ssim_index(mu_u, mu_r, var_u * inv, var_r * inv, cov * inv);
  }

  const std::size_t h = u.height(), w = u.width();
  if (h < kWindow || w < kWindow) throw InputError("SSIM requires images of at least 11x11");
  const auto g = gaussian_window_1d();
  std::vector<double> uu(n), rr(n), ur(n);
  for (std::size_t k = 0; k < n; ++k) {
    uu[k] = u[k] * u[k];
    rr[k] = ref[k] * ref[k];
    ur[k] = u[k] * ref[k];
  }
  const auto mu_u = filter_valid(u.values(), h, w, g);
  const auto mu_r = filter_valid(ref.values(), h, w, g);
  const auto e_uu = filter_valid(uu, h, w, g);
  const auto e_rr = filter_valid(rr, h, w, g);
  const auto e_ur = filter_valid(ur, h, w, g);

  double acc = 0.0;
  for (std::size_t k = 0; k < mu_u.size(); ++k) {
    acc += ssim_index(mu_u[k], mu_r[k], e_uu[k] - mu_u[k] * mu_u[k], e_rr[k] - mu_r[k] * mu_r[k],
                      e_ur[k] - mu_u[k] * mu_r[k]);
  }
  return acc / static_cast<double>(mu_u.size());
}

QualityReport assess(const ImageGrid& u, const ImageGrid& ref, SsimMode mode) {
  const ImageGrid clamped = clamp(u, 0.0, 255.0);
  QualityReport q;
  q.psnr = psnr(clamped, ref);
  q.snr = snr(clamped, ref);
  q.ssim = ssim(clamped, ref, mode);
  return q;
}

}  // namespace pdeblur
