#include "rdeg/corrupt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rdeg/codec.hpp"
#include "rdeg/error.hpp"

namespace rdeg {
namespace {

// Reflect-101 ("gfedcb|abcdefgh|gfedcba"), valid for any offset.
int reflect101(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

void check_kernel(int kernel) {
  if (kernel < kMinBlurKernel || kernel > kMaxBlurKernel || kernel % 2 == 0) {
    throw ParameterError("blur kernel must be odd and in [3, 31], got " +
                         std::to_string(kernel));
  }
}

Image map_lut(const Image& img, const std::array<std::uint8_t, 256>& lut) {
  Image out = img;
  for (auto& v : out.pixels()) v = lut[v];
  return out;
}

// Separable convolution with symmetric taps, accumulated in double and
// rounded once at the end.
Image convolve_separable(const Image& img, const std::vector<double>& taps) {
  const int w = img.width();
  const int h = img.height();
  const int r = static_cast<int>(taps.size()) / 2;
  std::vector<double> tmp(img.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < Image::kChannels; ++c) {
        double acc = 0.0;
        for (int t = -r; t <= r; ++t) {
          acc += taps[t + r] * img.at(reflect101(x + t, w), y, c);
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
      }
    }
  }
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < Image::kChannels; ++c) {
        double acc = 0.0;
        for (int t = -r; t <= r; ++t) {
          const int yy = reflect101(y + t, h);
          acc += taps[t + r] * tmp[(static_cast<std::size_t>(yy) * w + x) * 3 + c];
        }
        out.at(x, y, c) = saturate_u8(acc);
      }
    }
  }
  return out;
}

// Sliding-histogram median (one histogram per row sweep and channel).
Image median_filter(const Image& img, int kernel) {
  const int w = img.width();
  const int h = img.height();
  const int r = kernel / 2;
  const int rank = kernel * kernel / 2;
  Image out(w, h);
  std::array<int, 256> hist{};
  for (int c = 0; c < Image::kChannels; ++c) {
    for (int y = 0; y < h; ++y) {
      hist.fill(0);
      for (int dy = -r; dy <= r; ++dy) {
        const int yy = reflect101(y + dy, h);
        for (int dx = -r; dx <= r; ++dx) ++hist[img.at(reflect101(dx, w), yy, c)];
      }
      for (int x = 0; x < w; ++x) {
        if (x > 0) {
          const int drop = reflect101(x - r - 1, w);
          const int add = reflect101(x + r, w);
          for (int dy = -r; dy <= r; ++dy) {
            const int yy = reflect101(y + dy, h);
            --hist[img.at(drop, yy, c)];
            ++hist[img.at(add, yy, c)];
          }
        }
        int seen = 0;
        int v = 0;
        for (; v < 256; ++v) {
          seen += hist[v];
          if (seen > rank) break;
        }
        out.at(x, y, c) = static_cast<std::uint8_t>(v);
      }
    }
  }
  return out;
}

struct Tap {
  int src;
  double weight;
};

// Coverage weights of the source interval [i*s, (i+1)*s) for each output i.
std::vector<std::vector<Tap>> area_taps(int in, int out) {
  const double scale = static_cast<double>(in) / out;
  std::vector<std::vector<Tap>> taps(static_cast<std::size_t>(out));
  for (int i = 0; i < out; ++i) {
    const double lo = i * scale;
    const double hi = (i + 1) * scale;
    for (int s = static_cast<int>(std::floor(lo)); s < in && s < hi; ++s) {
      const double cover = std::min<double>(hi, s + 1) - std::max<double>(lo, s);
      if (cover > 1e-12) taps[i].push_back({s, cover / scale});
    }
  }
  return taps;
}

}  // namespace

Image gaussian_noise(const Image& img, double sigma, RngStream& rng) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("gaussian_noise: sigma must be >= 0");
  }
  Image out = img;
  if (sigma == 0.0) return out;
  for (auto& v : out.pixels()) v = saturate_u8(v + sigma * rng.normal());
  return out;
}

Image poisson_gaussian_noise(const Image& img, double a, double b, RngStream& rng) {
  if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ParameterError("poisson_gaussian_noise: a and b must be >= 0");
  }
  Image out = img;
  if (a == 0.0 && b == 0.0) return out;
  for (auto& v : out.pixels()) {
    const double y = v / 255.0;
    const double sd = std::sqrt(a * y + b);
    v = saturate_u8(255.0 * (y + sd * rng.normal()));
  }
  return out;
}

double gaussian_sigma_for_kernel(int kernel) noexcept { return 0.15 * kernel + 0.35; }

std::vector<double> gaussian_kernel_1d(int kernel) {
  check_kernel(kernel);
  const double sigma = gaussian_sigma_for_kernel(kernel);
  const int r = kernel / 2;
  std::vector<double> taps(static_cast<std::size_t>(kernel));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    taps[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += taps[i + r];
  }
  for (auto& t : taps) t /= sum;
  return taps;
}

Image blur(const Image& img, BlurFilter filter, int kernel) {
  check_kernel(kernel);
  switch (filter) {
    case BlurFilter::gaussian:
      return convolve_separable(img, gaussian_kernel_1d(kernel));
    case BlurFilter::average:
      return convolve_separable(img, std::vector<double>(kernel, 1.0 / kernel));
    case BlurFilter::median:
      return median_filter(img, kernel);
  }
  throw ParameterError("blur: unknown filter");
}

Image jpeg_round_trip(const Image& img, int quality) {
  return decode_image(encode_jpeg(img, quality));
}

Image area_resize(const Image& img, int width, int height) {
  if (width < 1 || height < 1) throw ParameterError("area_resize: bad target size");
  const auto xt = area_taps(img.width(), width);
  const auto yt = area_taps(img.height(), height);
  std::vector<double> tmp(static_cast<std::size_t>(width) * img.height() * 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (const Tap& t : xt[x]) acc += t.weight * img.at(t.src, y, c);
        tmp[(static_cast<std::size_t>(y) * width + x) * 3 + c] = acc;
      }
    }
  }
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (const Tap& t : yt[y]) {
          acc += t.weight * tmp[(static_cast<std::size_t>(t.src) * width + x) * 3 + c];
        }
        out.at(x, y, c) = saturate_u8(acc);
      }
    }
  }
  return out;
}

Image bilinear_resize(const Image& img, int width, int height) {
  if (width < 1 || height < 1) throw ParameterError("bilinear_resize: bad target size");
  auto coord = [](int dst, int in, int out, int& i0, int& i1, double& frac) {
    double s = (dst + 0.5) * static_cast<double>(in) / out - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in - 1));
    i0 = static_cast<int>(std::floor(s));
    i1 = std::min(i0 + 1, in - 1);
    frac = s - i0;
  };
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    int y0, y1;
    double fy;
    coord(y, img.height(), height, y0, y1, fy);
    for (int x = 0; x < width; ++x) {
      int x0, x1;
      double fx;
      coord(x, img.width(), width, x0, x1, fx);
      for (int c = 0; c < 3; ++c) {
        const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
        const double bot = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
        out.at(x, y, c) = saturate_u8(top * (1.0 - fy) + bot * fy);
      }
    }
  }
  return out;
}

Image resize_degrade(const Image& img, int factor) {
  if (factor != 2 && factor != 4 && factor != 8 && factor != 16) {
    throw ParameterError("resize factor must be one of 2, 4, 8, 16, got " +
                         std::to_string(factor));
  }
  if (img.width() < factor || img.height() < factor) {
    throw ParameterError("image is smaller than resize factor " + std::to_string(factor));
  }
  const Image small = area_resize(img, img.width() / factor, img.height() / factor);
  return bilinear_resize(small, img.width(), img.height());
}

Image gamma_correct(const Image& img, double g) {
  if (!(g > 0.0) || !std::isfinite(g)) throw ParameterError("gamma must be > 0");
  std::array<std::uint8_t, 256> lut{};
  for (int i = 0; i < 256; ++i) lut[i] = saturate_u8(255.0 * std::pow(i / 255.0, g));
  return map_lut(img, lut);
}

Image linear_adjust(const Image& img, double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw ParameterError("linear_adjust: alpha must be > 0");
  }
  std::array<std::uint8_t, 256> lut{};
  for (int i = 0; i < 256; ++i) lut[i] = saturate_u8(alpha * i + beta);
  return map_lut(img, lut);
}

Image adjust_brightness(const Image& img, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ParameterError("brightness factor must be > 0");
  }
  std::array<std::uint8_t, 256> lut{};
  for (int i = 0; i < 256; ++i) lut[i] = saturate_u8(i * factor);
  return map_lut(img, lut);
}

Image adjust_contrast(const Image& img, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ParameterError("contrast factor must be > 0");
  }
  double sum = 0.0;
  const auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); i += 3) {
    sum += 0.299 * px[i] + 0.587 * px[i + 1] + 0.114 * px[i + 2];
  }
  const double mean = sum / static_cast<double>(px.size() / 3);
  std::array<std::uint8_t, 256> lut{};
  for (int i = 0; i < 256; ++i) lut[i] = saturate_u8(mean + factor * (i - mean));
  return map_lut(img, lut);
}

}  // namespace rdeg
