#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rdeg {

/// 8-bit interleaved RGB raster, row-major. The only pixel type operators
/// accept or produce.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  /// Zero-filled image. Throws ParameterError unless width, height >= 1.
  Image(int width, int height);
  Image(int width, int height, std::uint8_t fill);
  /// Takes ownership of `pixels`; its size must be width*height*3.
  Image(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }
  std::size_t size() const noexcept { return pixels_.size(); }

  std::uint8_t& at(int x, int y, int c) noexcept {
    return pixels_[index(x, y, c)];
  }
  std::uint8_t at(int x, int y, int c) const noexcept {
    return pixels_[index(x, y, c)];
  }

  std::span<std::uint8_t> pixels() noexcept { return pixels_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::uint8_t* data() noexcept { return pixels_.data(); }
  const std::uint8_t* data() const noexcept { return pixels_.data(); }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * kChannels +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Rounds half away from zero and saturates to [0, 255].
inline std::uint8_t saturate_u8(double v) noexcept {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 254.5) return 255;
  return static_cast<std::uint8_t>(v + 0.5);
}

/// Peak signal-to-noise ratio in dB; +inf for identical images.
double psnr(const Image& a, const Image& b);

}  // namespace rdeg
