#include "rdeg/augment.hpp"

#include <cmath>
#include <string>

#include "rdeg/corrupt.hpp"
#include "rdeg/error.hpp"

namespace rdeg {
namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError(std::string("augment config: ") + name + " must be in [0, 1]");
  }
}

AugmentMode parse_mode(const std::string& s) {
  if (s == "stochastic") return AugmentMode::stochastic;
  if (s == "non_stochastic") return AugmentMode::non_stochastic;
  if (s == "noise_only") return AugmentMode::noise_only;
  throw ParameterError("unknown augment mode '" + s + "'");
}

std::string_view enhance_name(EnhanceKind k) {
  switch (k) {
    case EnhanceKind::brightness: return "brightness";
    case EnhanceKind::contrast: return "contrast";
    default: return "none";
  }
}

std::string_view blur_name(BlurKind k) {
  switch (k) {
    case BlurKind::gaussian: return "gaussian";
    case BlurKind::average: return "average";
    default: return "none";
  }
}

EnhanceKind parse_enhance(const std::string& s) {
  if (s == "brightness") return EnhanceKind::brightness;
  if (s == "contrast") return EnhanceKind::contrast;
  if (s == "none") return EnhanceKind::none;
  throw ParameterError("unknown enhancement kind '" + s + "'");
}

BlurKind parse_blur(const std::string& s) {
  if (s == "gaussian") return BlurKind::gaussian;
  if (s == "average") return BlurKind::average;
  if (s == "none") return BlurKind::none;
  throw ParameterError("unknown blur kind '" + s + "'");
}

// One stage of the chain: whether it fires in this mode.
bool stage_fires(const AugmentConfig& cfg, double p, bool is_noise, RngStream& rng) {
  switch (cfg.mode) {
    case AugmentMode::non_stochastic: return true;
    case AugmentMode::noise_only: return is_noise && rng.bernoulli(p);
    case AugmentMode::stochastic: return rng.bernoulli(p);
  }
  return false;
}

}  // namespace

void validate(const AugmentConfig& cfg) {
  check_probability(cfg.p_enh, "p_enh");
  check_probability(cfg.p_blur, "p_blur");
  check_probability(cfg.p_noise, "p_noise");
  check_probability(cfg.p_jpeg, "p_jpeg");
  if (!(cfg.enh_factor_range.lo > 0.0 && cfg.enh_factor_range.lo <= cfg.enh_factor_range.hi)) {
    throw ParameterError("augment config: enh_factor_range must be non-empty and > 0");
  }
  const auto [klo, khi] = cfg.blur_kernel_range;
  if (klo > khi || klo % 2 == 0 || khi % 2 == 0 || klo < kMinBlurKernel ||
      khi > kMaxBlurKernel) {
    throw ParameterError("augment config: blur_kernel_range needs odd bounds in [3, 31]");
  }
  if (!(cfg.noise_sigma_range.lo >= 0.0 && cfg.noise_sigma_range.lo <= cfg.noise_sigma_range.hi)) {
    throw ParameterError("augment config: noise_sigma_range must be non-empty and >= 0");
  }
  const auto [qlo, qhi] = cfg.jpeg_quality_range;
  if (qlo > qhi || qlo < 1 || qhi > 100) {
    throw ParameterError("augment config: jpeg_quality_range must lie in [1, 100]");
  }
}

AugmentConfig augment_preset(std::string_view name) {
  AugmentConfig cfg;
  if (name == "paper-default") return cfg;
  if (name == "gn-only") {
    cfg.mode = AugmentMode::noise_only;
    return cfg;
  }
  if (name == "non-stochastic") {
    cfg.mode = AugmentMode::non_stochastic;
    return cfg;
  }
  throw ParameterError("unknown augmentation preset '" + std::string(name) + "'");
}

std::string_view to_string(AugmentMode mode) noexcept {
  switch (mode) {
    case AugmentMode::stochastic: return "stochastic";
    case AugmentMode::non_stochastic: return "non_stochastic";
    case AugmentMode::noise_only: return "noise_only";
  }
  return "?";
}

void validate(const AugmentTrace& t) {
  auto fail = [](const char* what) { throw ParameterError(std::string("inconsistent trace: ") + what); };
  if (t.enh_applied != (t.enh_kind != EnhanceKind::none)) fail("enhancement flag vs kind");
  if (t.enh_applied && !(t.enh_factor > 0.0)) fail("enhancement factor must be > 0");
  if (t.blur_applied != (t.blur_kind != BlurKind::none)) fail("blur flag vs kind");
  if (t.blur_applied && (t.blur_kernel < kMinBlurKernel || t.blur_kernel > kMaxBlurKernel ||
                         t.blur_kernel % 2 == 0)) {
    fail("blur kernel must be odd and in [3, 31]");
  }
  if (t.noise_applied && !(t.noise_sigma >= 0.0)) fail("noise sigma must be >= 0");
  if (t.jpeg_applied && (t.jpeg_quality < 1 || t.jpeg_quality > 100)) {
    fail("jpeg quality must be in [1, 100]");
  }
}

AugmentTrace sample_chain(const AugmentConfig& cfg, RngStream& rng) {
  validate(cfg);
  AugmentTrace t;
  if (stage_fires(cfg, cfg.p_enh, false, rng)) {
    t.enh_applied = true;
    t.enh_kind = rng.bernoulli(0.5) ? EnhanceKind::brightness : EnhanceKind::contrast;
    t.enh_factor = rng.uniform(cfg.enh_factor_range.lo, cfg.enh_factor_range.hi);
  }
  if (stage_fires(cfg, cfg.p_blur, false, rng)) {
    t.blur_applied = true;
    t.blur_kind = rng.bernoulli(0.5) ? BlurKind::gaussian : BlurKind::average;
    const int half_lo = (cfg.blur_kernel_range.lo - 1) / 2;
    const int half_hi = (cfg.blur_kernel_range.hi - 1) / 2;
    t.blur_kernel = 2 * static_cast<int>(rng.uniform_int(half_lo, half_hi)) + 1;
  }
  if (stage_fires(cfg, cfg.p_noise, true, rng)) {
    t.noise_applied = true;
    t.noise_sigma = rng.uniform(cfg.noise_sigma_range.lo, cfg.noise_sigma_range.hi);
  }
  if (stage_fires(cfg, cfg.p_jpeg, false, rng)) {
    t.jpeg_applied = true;
    t.jpeg_quality = static_cast<int>(
        rng.uniform_int(cfg.jpeg_quality_range.lo, cfg.jpeg_quality_range.hi));
  }
  return t;
}

namespace {

// Everything up to (not including) the JPEG stage.
Image apply_pre_jpeg(const Image& img, const AugmentTrace& trace, RngStream& rng) {
  validate(trace);
  Image out = img;
  if (trace.enh_applied) {
    out = trace.enh_kind == EnhanceKind::brightness ? adjust_brightness(out, trace.enh_factor)
                                                    : adjust_contrast(out, trace.enh_factor);
  }
  if (trace.blur_applied) {
    out = blur(out, trace.blur_kind == BlurKind::gaussian ? BlurFilter::gaussian : BlurFilter::average,
               trace.blur_kernel);
  }
  if (trace.noise_applied) out = gaussian_noise(out, trace.noise_sigma, rng);
  return out;
}

}  // namespace

Image apply_trace(const Image& img, const AugmentTrace& trace, RngStream& rng) {
  Image out = apply_pre_jpeg(img, trace, rng);
  if (trace.jpeg_applied) out = jpeg_round_trip(out, trace.jpeg_quality);
  return out;
}

EncodedImage apply_trace_encoded(const Image& img, const AugmentTrace& trace, RngStream& rng) {
  const Image out = apply_pre_jpeg(img, trace, rng);
  if (trace.jpeg_applied) return {encode_jpeg(out, trace.jpeg_quality), ImageFormat::jpeg};
  return {encode_png(out), ImageFormat::png};
}

std::pair<Image, AugmentTrace> augment(const Image& img, const AugmentConfig& cfg,
                                       RngStream& rng) {
  AugmentTrace trace = sample_chain(cfg, rng);
  Image out = apply_trace(img, trace, rng);
  return {std::move(out), trace};
}

void to_json(nlohmann::json& j, const AugmentConfig& cfg) {
  j = nlohmann::json{
      {"p_enh", cfg.p_enh},
      {"enh_factor_range", {cfg.enh_factor_range.lo, cfg.enh_factor_range.hi}},
      {"p_blur", cfg.p_blur},
      {"blur_kernel_range", {cfg.blur_kernel_range.lo, cfg.blur_kernel_range.hi}},
      {"p_noise", cfg.p_noise},
      {"noise_sigma_range", {cfg.noise_sigma_range.lo, cfg.noise_sigma_range.hi}},
      {"p_jpeg", cfg.p_jpeg},
      {"jpeg_quality_range", {cfg.jpeg_quality_range.lo, cfg.jpeg_quality_range.hi}},
      {"mode", std::string(to_string(cfg.mode))},
  };
}

void from_json(const nlohmann::json& j, AugmentConfig& cfg) {
  try {
    cfg = AugmentConfig{};
    if (j.contains("preset")) cfg = augment_preset(j.at("preset").get<std::string>());
    auto interval = [&](const char* key, Interval& out) {
      if (!j.contains(key)) return;
      const auto v = j.at(key).get<std::vector<double>>();
      if (v.size() != 2) throw ParameterError(std::string(key) + " needs two values");
      out = {v[0], v[1]};
    };
    auto int_interval = [&](const char* key, IntInterval& out) {
      if (!j.contains(key)) return;
      const auto v = j.at(key).get<std::vector<int>>();
      if (v.size() != 2) throw ParameterError(std::string(key) + " needs two values");
      out = {v[0], v[1]};
    };
    cfg.p_enh = j.value("p_enh", cfg.p_enh);
    cfg.p_blur = j.value("p_blur", cfg.p_blur);
    cfg.p_noise = j.value("p_noise", cfg.p_noise);
    cfg.p_jpeg = j.value("p_jpeg", cfg.p_jpeg);
    interval("enh_factor_range", cfg.enh_factor_range);
    int_interval("blur_kernel_range", cfg.blur_kernel_range);
    interval("noise_sigma_range", cfg.noise_sigma_range);
    int_interval("jpeg_quality_range", cfg.jpeg_quality_range);
    if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("augment config: ") + e.what());
  }
  validate(cfg);
}

void to_json(nlohmann::json& j, const AugmentTrace& t) {
  j = nlohmann::json::object();
  j["enh_applied"] = t.enh_applied;
  if (t.enh_applied) {
    j["enh_kind"] = std::string(enhance_name(t.enh_kind));
    j["enh_factor"] = t.enh_factor;
  }
  j["blur_applied"] = t.blur_applied;
  if (t.blur_applied) {
    j["blur_kind"] = std::string(blur_name(t.blur_kind));
    j["blur_kernel"] = t.blur_kernel;
  }
  j["noise_applied"] = t.noise_applied;
  if (t.noise_applied) j["noise_sigma"] = t.noise_sigma;
  j["jpeg_applied"] = t.jpeg_applied;
  if (t.jpeg_applied) j["jpeg_quality"] = t.jpeg_quality;
}

void from_json(const nlohmann::json& j, AugmentTrace& t) {
  try {
    t = AugmentTrace{};
    t.enh_applied = j.at("enh_applied").get<bool>();
    if (t.enh_applied) {
      t.enh_kind = parse_enhance(j.at("enh_kind").get<std::string>());
      t.enh_factor = j.at("enh_factor").get<double>();
    }
    t.blur_applied = j.at("blur_applied").get<bool>();
    if (t.blur_applied) {
      t.blur_kind = parse_blur(j.at("blur_kind").get<std::string>());
      t.blur_kernel = j.at("blur_kernel").get<int>();
    }
    t.noise_applied = j.at("noise_applied").get<bool>();
    if (t.noise_applied) t.noise_sigma = j.at("noise_sigma").get<double>();
    t.jpeg_applied = j.at("jpeg_applied").get<bool>();
    if (t.jpeg_applied) t.jpeg_quality = j.at("jpeg_quality").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("augment trace: ") + e.what());
  }
  validate(t);
}

}  // namespace rdeg
