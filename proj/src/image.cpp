#include "pdeblur/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "pdeblur/error.hpp"

namespace pdeblur {

ImageGrid::ImageGrid(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), data_(height * width, fill) {}

ImageGrid::ImageGrid(std::size_t height, std::size_t width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (data_.size() != height_ * width_) {
    throw InputError("ImageGrid: data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(height_) + "x" + std::to_string(width_));
  }
}

void ImageGrid::validate() const {
  if (height_ == 0 || width_ == 0) throw InputError("image has zero extent");
  if (data_.size() != height_ * width_) throw InputError("image data length mismatch");
  for (double v : data_) {
    if (!std::isfinite(v)) throw InputError("image contains a non-finite value");
  }
}

ImageGrid& ImageGrid::operator+=(const ImageGrid& rhs) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

ImageGrid& ImageGrid::operator-=(const ImageGrid& rhs) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

ImageGrid& ImageGrid::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

ImageGrid operator+(ImageGrid lhs, const ImageGrid& rhs) { return lhs += rhs; }
ImageGrid operator-(ImageGrid lhs, const ImageGrid& rhs) { return lhs -= rhs; }
ImageGrid operator*(ImageGrid lhs, double s) { return lhs *= s; }
ImageGrid operator*(double s, ImageGrid rhs) { return rhs *= s; }

double inner_product(const ImageGrid& a, const ImageGrid& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(const ImageGrid& a) { return std::sqrt(inner_product(a, a)); }

ImageGrid transpose(const ImageGrid& a) {
  ImageGrid out(a.width(), a.height());
  for (std::size_t i = 0; i < a.height(); ++i)
    for (std::size_t j = 0; j < a.width(); ++j) out(j, i) = a(i, j);
  return out;
}

ImageGrid clamp(const ImageGrid& a, double lo, double hi) {
  ImageGrid out = a;
  for (double& v : out.data()) v = std::clamp(v, lo, hi);
  return out;
}

double min_value(const ImageGrid& a) {
  return *std::min_element(a.values().begin(), a.values().end());
}

double max_value(const ImageGrid& a) {
  return *std::max_element(a.values().begin(), a.values().end());
}

unsigned char quantize_pixel(double value) noexcept {
  // std::round rounds halfway cases away from zero
  return static_cast<unsigned char>(std::round(std::clamp(value, 0.0, 255.0)));
}

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string next_pnm_token(const std::string& buf, std::size_t& pos) {
  while (pos < buf.size()) {
    const char c = buf[pos];
    if (c == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos])) && buf[pos] != '#')
    ++pos;
  return buf.substr(start, pos - start);
}

std::size_t parse_pnm_int(const std::string& tok, const std::string& what) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw InputError("malformed PGM header: bad " + what);
  return std::stoul(tok);
}

ImageGrid load_pgm(const std::string& buf, const std::filesystem::path& path) {
  std::size_t pos = 0;
  const std::string magic = next_pnm_token(buf, pos);
  if (magic == "P3" || magic == "P6")
    throw InputError(path.string() + ": grayscale required (got a color PPM)");
  if (magic != "P2" && magic != "P5")
    throw InputError(path.string() + ": unsupported format (expected PGM P2/P5 or PNG)");
  const std::size_t width = parse_pnm_int(next_pnm_token(buf, pos), "width");
  const std::size_t height = parse_pnm_int(next_pnm_token(buf, pos), "height");
  const std::size_t maxval = parse_pnm_int(next_pnm_token(buf, pos), "maxval");
  if (width == 0 || height == 0) throw InputError(path.string() + ": zero image extent");
  if (maxval == 0 || maxval > 255)
    throw InputError(path.string() + ": unsupported PGM maxval " + std::to_string(maxval) +
                     " (8-bit only)");

  std::vector<double> data(width * height);
  if (magic == "P5") {
    ++pos;  // single whitespace byte after maxval
    if (buf.size() < pos + data.size()) throw InputError(path.string() + ": truncated PGM data");
    for (std::size_t i = 0; i < data.size(); ++i)
      data[i] = static_cast<unsigned char>(buf[pos + i]);
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::string tok = next_pnm_token(buf, pos);
      if (tok.empty()) throw InputError(path.string() + ": truncated PGM data");
      const std::size_t v = parse_pnm_int(tok, "pixel");
      if (v > maxval) throw InputError(path.string() + ": pixel exceeds maxval");
      data[i] = static_cast<double>(v);
    }
  }
  return ImageGrid(height, width, std::move(data));
}

ImageGrid load_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw InputError(path.string() + ": " + image.message);
  if (image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA)) {
    png_image_free(&image);
    throw InputError(path.string() + ": grayscale required");
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw InputError(path.string() + ": unsupported format (16-bit PNG)");
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<png_byte> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr))
    throw InputError(path.string() + ": " + image.message);

  std::vector<double> data(pixels.begin(), pixels.end());
  return ImageGrid(image.height, image.width, std::move(data));
}

}  // namespace

ImageGrid load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (buf.size() >= 8 && std::equal(kPngSig, kPngSig + 8, buf.begin(),
                                     [](unsigned char a, char b) { return a == static_cast<unsigned char>(b); })) {
    in.close();
    return load_png(path);
  }
  return load_pgm(buf, path);
}

void save_image(const ImageGrid& grid, const std::filesystem::path& path) {
  grid.validate();
  std::vector<unsigned char> bytes(grid.size());
  std::transform(grid.values().begin(), grid.values().end(), bytes.begin(), quantize_pixel);

  if (lower_extension(path) == ".png") {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(grid.width());
    image.height = static_cast<png_uint_32>(grid.height());
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr))
      throw InputError("cannot write " + path.string() + ": " + image.message);
    return;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << "P5\n" << grid.width() << ' ' << grid.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("write failed: " + path.string());
}

ImageGrid make_synthetic(std::size_t size) {
  if (size < 32) throw InputError("synthetic image size must be >= 32");
  const double n = static_cast<double>(size);
  ImageGrid img(size, size, 60.0);

  const double cx = n / 3.0;
  const double cy = n / 3.0;
  const double radius = n / 5.0;
  const std::size_t margin = size / 16;
  const std::size_t lo = size / 2 + margin;
  const std::size_t hi = size - margin;

  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      const double dy = static_cast<double>(i) - cy;
      const double dx = static_cast<double>(j) - cx;
      if (dx * dx + dy * dy <= radius * radius) img(i, j) = 200.0;
      if (i >= lo && i < hi && j >= lo && j < hi) img(i, j) = 130.0;
      const long diag = static_cast<long>(i + j) - static_cast<long>(size - 1);
      if (diag >= -1 && diag <= 1) img(i, j) = 255.0;
    }
  }
  return img;
}

}  // namespace pdeblur
