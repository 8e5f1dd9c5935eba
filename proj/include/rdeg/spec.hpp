#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rdeg/codec.hpp"
#include "rdeg/image.hpp"
#include "rdeg/rng.hpp"

namespace rdeg {

enum class CorruptionKind {
  unaltered,
  gaussian_noise,
  poisson_gaussian_noise,
  gaussian_blur,
  average_blur,
  median_blur,
  jpeg,
  resize_degrade,
  gamma,
  linear_adjust,
  compose,
};

std::string_view to_string(CorruptionKind kind) noexcept;
/// Throws ParameterError for an unknown name.
CorruptionKind parse_kind(std::string_view name);

/// A named corruption with its parameters.
///
/// Required params per kind:
///   gaussian_noise          sigma
///   poisson_gaussian_noise  a, b
///   *_blur                  kernel
///   jpeg                    quality
///   resize_degrade          factor
///   gamma                   g
///   linear_adjust           alpha, beta
///   compose, unaltered      (none)
/// compose additionally carries >= 2 children, applied left to right.
struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::unaltered;
  std::map<std::string, double> params;
  std::string label;
  std::vector<CorruptionSpec> children;

  double param(const std::string& name) const;

  friend bool operator==(const CorruptionSpec&, const CorruptionSpec&) = default;
};

/// Throws ParameterError describing the first problem found.
void validate(const CorruptionSpec& spec);

/// Display label derived from kind and params, e.g. "JPEG 60", "GN+GB" style
/// joins for compose.
std::string default_label(const CorruptionSpec& spec);

/// Builds a spec from the compact form used on the command line:
///   kind[:name=value[,name=value...]]['+' kind...]
/// Several '+'-joined terms become a compose. Label defaults to
/// default_label().
CorruptionSpec parse_spec_string(std::string_view text);

/// The single strength parameter plotted on a severity sweep, if the kind has
/// one (sigma, a, kernel, quality, factor, g).
std::optional<double> severity_of(const CorruptionSpec& spec);

/// Dispatches to the operator for spec.kind. compose hands child i the
/// sub-stream rng.substream(std::to_string(i)).
Image apply_spec(const Image& img, const CorruptionSpec& spec, RngStream& rng);

/// True when the last operator applied by `spec` is JPEG.
bool ends_with_jpeg(const CorruptionSpec& spec);

/// apply_spec, then serialise. Specs ending in JPEG yield the JPEG stream the
/// final stage produced; everything else is stored as PNG. Decoding the bytes
/// always reproduces apply_spec().
EncodedImage materialize(const Image& img, const CorruptionSpec& spec, RngStream& rng);

/// Ordered evaluation cells. The first cell is always the "unaltered" one and
/// labels are unique.
struct SeverityGrid {
  std::vector<CorruptionSpec> cells;

  const CorruptionSpec* find(std::string_view label) const;
  friend bool operator==(const SeverityGrid&, const SeverityGrid&) = default;
};

inline constexpr std::string_view kUnalteredLabel = "unaltered";

void validate(const SeverityGrid& grid);

SeverityGrid builtin_grid();

void to_json(nlohmann::json& j, const CorruptionSpec& spec);
void from_json(const nlohmann::json& j, CorruptionSpec& spec);
void to_json(nlohmann::json& j, const SeverityGrid& grid);
/// Prepends the unaltered cell when the document omits it.
void from_json(const nlohmann::json& j, SeverityGrid& grid);

/// "builtin" selects builtin_grid(); anything else is a JSON file path.
SeverityGrid load_grid(const std::string& source);
void save_grid(const SeverityGrid& grid, const std::filesystem::path& path);

/// Shortest decimal form that round-trips (std::to_chars), e.g. "0.75", "30".
std::string format_number(double v);

}  // namespace rdeg
