#include "rdeg/image.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rdeg/error.hpp"

namespace rdeg {
namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw ParameterError("image dimensions must be >= 1, got " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
}

std::size_t sample_count(int width, int height) {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
         Image::kChannels;
}

}  // namespace

Image::Image(int width, int height) : Image(width, height, 0) {}

Image::Image(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(sample_count(width, height), fill);
}

Image::Image(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != sample_count(width, height)) {
    throw ParameterError("pixel buffer holds " + std::to_string(pixels_.size()) +
                         " samples, expected " +
                         std::to_string(sample_count(width, height)));
  }
}

double psnr(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw ParameterError("psnr: image shapes differ");
  double sse = 0.0;
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(pa.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace rdeg
