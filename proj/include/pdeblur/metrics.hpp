#pragma once

#include "pdeblur/image.hpp"

namespace pdeblur {

/// Peak signal-to-noise ratio in dB against a 255 peak. Returns +infinity
/// for identical images.
double psnr(const ImageGrid& u, const ImageGrid& ref);

/// 20 log10(||ref|| / ||ref - u||) in dB; +infinity for identical images.
double snr(const ImageGrid& u, const ImageGrid& ref);

enum class SsimMode { Windowed, Global };

/// Structural similarity with C1 = (0.01*255)^2, C2 = (0.03*255)^2.
/// Windowed: mean of the local index over every position of an 11x11
/// Gaussian window (sigma 1.5) lying fully inside the image.
/// Global: the index evaluated once over the whole image.
double ssim(const ImageGrid& u, const ImageGrid& ref, SsimMode mode = SsimMode::Windowed);

struct QualityReport {
  double psnr = 0.0;
  double snr = 0.0;
  double ssim = 0.0;
  int iterations = 0;
  double cpu_seconds = 0.0;
};

/// Metrics of u against ref after clamping u to [0, 255].
QualityReport assess(const ImageGrid& u, const ImageGrid& ref, SsimMode mode = SsimMode::Windowed);

}  // namespace pdeblur
