#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace pdeblur {

/// Row-major grid of real pixel intensities, nominal range [0, 255].
///
/// Every per-pixel field of the restoration (image, gradient fields,
/// auxiliary variables, multipliers) is carried by this type.
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(std::size_t height, std::size_t width, double fill = 0.0);
  ImageGrid(std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t row, std::size_t col) noexcept {
    return data_[row * width_ + col];
  }
  double operator()(std::size_t row, std::size_t col) const noexcept {
    return data_[row * width_ + col];
  }
  double& operator[](std::size_t idx) noexcept { return data_[idx]; }
  double operator[](std::size_t idx) const noexcept { return data_[idx]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  bool same_shape(const ImageGrid& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  /// Throws InputError when dimensions are zero or any entry is non-finite.
  void validate() const;

  ImageGrid& operator+=(const ImageGrid& rhs);
  ImageGrid& operator-=(const ImageGrid& rhs);
  ImageGrid& operator*=(double s);

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

ImageGrid operator+(ImageGrid lhs, const ImageGrid& rhs);
ImageGrid operator-(ImageGrid lhs, const ImageGrid& rhs);
ImageGrid operator*(ImageGrid lhs, double s);
ImageGrid operator*(double s, ImageGrid rhs);

/// Sum over pixels of a*b.
double inner_product(const ImageGrid& a, const ImageGrid& b);
/// Euclidean norm over all pixels.
double norm2(const ImageGrid& a);
ImageGrid transpose(const ImageGrid& a);
/// Pointwise clamp to [lo, hi].
ImageGrid clamp(const ImageGrid& a, double lo, double hi);
double min_value(const ImageGrid& a);
double max_value(const ImageGrid& a);

/// Reads an 8-bit grayscale PGM (P2 or P5, maxval 255) or PNG.
ImageGrid load_image(const std::filesystem::path& path);

/// Writes a PNG when the extension is ".png", binary PGM otherwise.
/// Values are clamped to [0, 255] and rounded half away from zero.
void save_image(const ImageGrid& grid, const std::filesystem::path& path);

/// The 8-bit value a pixel is stored as on save.
unsigned char quantize_pixel(double value) noexcept;

/// Deterministic piecewise-constant phantom: background 60, a disk (200),
/// a rectangle (130) and a 3-pixel anti-diagonal stripe (255).
ImageGrid make_synthetic(std::size_t size);

}  // namespace pdeblur
