#pragma once

#include <vector>

#include "rdeg/image.hpp"
#include "rdeg/rng.hpp"

// Corruption operators. All of them preserve width, height and channel count
// and never modify their input. Only the noise operators read from the rng.
namespace rdeg {

/// out = clamp(round(in + N(0, sigma^2))), one draw per sample in raster order.
Image gaussian_noise(const Image& img, double sigma, RngStream& rng);

/// Signal-dependent noise: with y = in/255,
/// out = clamp(round(255 * (y + sqrt(a*y + b) * N(0,1)))).
Image poisson_gaussian_noise(const Image& img, double a, double b, RngStream& rng);

enum class BlurFilter { gaussian, average, median };

constexpr int kMinBlurKernel = 3;
constexpr int kMaxBlurKernel = 31;

/// sigma = 0.15 * kernel + 0.35
double gaussian_sigma_for_kernel(int kernel) noexcept;

/// Normalized 1-D Gaussian taps; the 2-D kernel is their outer product.
std::vector<double> gaussian_kernel_1d(int kernel);

/// Per-channel k x k filtering with reflect-101 borders. Kernel must be odd
/// and in [3, 31].
Image blur(const Image& img, BlurFilter filter, int kernel);

/// Encode as baseline JPEG at `quality` and decode back.
Image jpeg_round_trip(const Image& img, int quality);

/// Area-average resampling to an arbitrary size (fractional pixel coverage).
Image area_resize(const Image& img, int width, int height);

/// Bilinear resampling with pixel-centre alignment and edge clamping.
Image bilinear_resize(const Image& img, int width, int height);

/// Area downscale by 1/factor, then bilinear upscale back to the input size.
/// factor must be one of {2, 4, 8, 16} and not exceed either dimension.
Image resize_degrade(const Image& img, int factor);

/// out = round(255 * (in/255)^g), g > 0.
Image gamma_correct(const Image& img, double g);

/// out = clamp(round(alpha * in + beta)), alpha > 0.
Image linear_adjust(const Image& img, double alpha, double beta);

/// out = clamp(round(in * factor)), factor > 0.
Image adjust_brightness(const Image& img, double factor);

/// Blend about the image's mean luma (BT.601 weights):
/// out = clamp(round(mean + factor * (in - mean))), factor > 0.
Image adjust_contrast(const Image& img, double factor);

}  // namespace rdeg
