#pragma once

#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "rdeg/codec.hpp"
#include "rdeg/image.hpp"
#include "rdeg/rng.hpp"

namespace rdeg {

enum class AugmentMode {
  stochastic,      ///< each stage fires with its own probability
  non_stochastic,  ///< all four stages always fire
  noise_only,      ///< only the noise stage may fire
};

struct Interval {
  double lo;
  double hi;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct IntInterval {
  int lo;
  int hi;
  friend bool operator==(const IntInterval&, const IntInterval&) = default;
};

/// Probabilities and parameter ranges of the training augmentation chain
///   enhancement -> blur -> additive Gaussian noise -> JPEG.
/// Defaults are the reference values.
struct AugmentConfig {
  double p_enh = 0.5;
  Interval enh_factor_range{0.5, 1.5};
  double p_blur = 0.5;
  IntInterval blur_kernel_range{3, 15};  ///< odd bounds; odd kernels sampled
  double p_noise = 0.3;
  Interval noise_sigma_range{0.0, 50.0};
  double p_jpeg = 0.7;
  IntInterval jpeg_quality_range{10, 95};
  AugmentMode mode = AugmentMode::stochastic;

  friend bool operator==(const AugmentConfig&, const AugmentConfig&) = default;
};

/// Throws ParameterError if a probability is outside [0,1], a range is empty
/// or out of the operators' domain, or a kernel bound is even.
void validate(const AugmentConfig& cfg);

/// Named presets: "paper-default", "gn-only", "non-stochastic".
AugmentConfig augment_preset(std::string_view name);

std::string_view to_string(AugmentMode mode) noexcept;

enum class EnhanceKind { none, brightness, contrast };
enum class BlurKind { none, gaussian, average };

/// The sampled decisions for one image. Parameters are meaningful only when
/// the stage's applied flag is set; otherwise they hold their defaults.
struct AugmentTrace {
  bool enh_applied = false;
  EnhanceKind enh_kind = EnhanceKind::none;
  double enh_factor = 0.0;
  bool blur_applied = false;
  BlurKind blur_kind = BlurKind::none;
  int blur_kernel = 0;
  bool noise_applied = false;
  double noise_sigma = 0.0;
  bool jpeg_applied = false;
  int jpeg_quality = 0;

  friend bool operator==(const AugmentTrace&, const AugmentTrace&) = default;
};

/// Throws ParameterError when flags and parameters disagree.
void validate(const AugmentTrace& trace);

AugmentTrace sample_chain(const AugmentConfig& cfg, RngStream& rng);

/// Runs the applied stages in chain order; noise draws from `rng`.
Image apply_trace(const Image& img, const AugmentTrace& trace, RngStream& rng);

/// apply_trace, serialised: when the JPEG stage ran, the bytes are the JPEG
/// stream it produced, otherwise PNG. Decoding gives apply_trace()'s image.
EncodedImage apply_trace_encoded(const Image& img, const AugmentTrace& trace, RngStream& rng);

/// sample_chain followed by apply_trace on the same stream.
std::pair<Image, AugmentTrace> augment(const Image& img, const AugmentConfig& cfg,
                                       RngStream& rng);

void to_json(nlohmann::json& j, const AugmentConfig& cfg);
/// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, AugmentConfig& cfg);
/// Parameter keys are written only for applied stages.
void to_json(nlohmann::json& j, const AugmentTrace& trace);
void from_json(const nlohmann::json& j, AugmentTrace& trace);

}  // namespace rdeg
