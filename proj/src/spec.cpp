#include "rdeg/spec.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <utility>

#include "rdeg/corrupt.hpp"
#include "rdeg/error.hpp"

namespace rdeg {
namespace {

using Kind = CorruptionKind;

constexpr std::array<std::pair<Kind, std::string_view>, 11> kKindNames{{
    {Kind::unaltered, "unaltered"},
    {Kind::gaussian_noise, "gaussian_noise"},
    {Kind::poisson_gaussian_noise, "poisson_gaussian_noise"},
    {Kind::gaussian_blur, "gaussian_blur"},
    {Kind::average_blur, "average_blur"},
    {Kind::median_blur, "median_blur"},
    {Kind::jpeg, "jpeg"},
    {Kind::resize_degrade, "resize_degrade"},
    {Kind::gamma, "gamma"},
    {Kind::linear_adjust, "linear_adjust"},
    {Kind::compose, "compose"},
}};

std::vector<std::string> required_params(Kind kind) {
  switch (kind) {
    case Kind::gaussian_noise: return {"sigma"};
    case Kind::poisson_gaussian_noise: return {"a", "b"};
    case Kind::gaussian_blur:
    case Kind::average_blur:
    case Kind::median_blur: return {"kernel"};
    case Kind::jpeg: return {"quality"};
    case Kind::resize_degrade: return {"factor"};
    case Kind::gamma: return {"g"};
    case Kind::linear_adjust: return {"alpha", "beta"};
    case Kind::unaltered:
    case Kind::compose: return {};
  }
  return {};
}

int integral_param(const CorruptionSpec& spec, const std::string& name) {
  const double v = spec.param(name);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ParameterError(std::string(to_string(spec.kind)) + ": parameter '" + name +
                         "' must be an integer");
  }
  return static_cast<int>(v);
}

BlurFilter blur_filter(Kind kind) {
  switch (kind) {
    case Kind::gaussian_blur: return BlurFilter::gaussian;
    case Kind::average_blur: return BlurFilter::average;
    default: return BlurFilter::median;
  }
}

CorruptionSpec leaf(Kind kind, std::map<std::string, double> params) {
  CorruptionSpec s{kind, std::move(params), {}, {}};
  s.label = default_label(s);
  return s;
}

CorruptionSpec labelled(CorruptionSpec s, std::string label) {
  s.label = std::move(label);
  return s;
}

CorruptionSpec compose(std::string label, std::vector<CorruptionSpec> children) {
  CorruptionSpec s{Kind::compose, {}, std::move(label), std::move(children)};
  return s;
}

double parse_double(std::string_view text, std::string_view context) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ParameterError("invalid number '" + std::string(text) + "' in " +
                         std::string(context));
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

CorruptionSpec parse_term(std::string_view term) {
  term = trim(term);
  const auto colon = term.find(':');
  CorruptionSpec spec;
  spec.kind = parse_kind(trim(term.substr(0, colon)));
  if (colon != std::string_view::npos) {
    std::string_view rest = term.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw ParameterError("expected name=value in '" + std::string(term) + "'");
      }
      spec.params[std::string(trim(item.substr(0, eq)))] =
          parse_double(trim(item.substr(eq + 1)), term);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  spec.label = default_label(spec);
  validate(spec);
  return spec;
}

}  // namespace

std::string_view to_string(CorruptionKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

CorruptionKind parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw ParameterError("unknown corruption kind '" + std::string(name) + "'");
}

double CorruptionSpec::param(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) {
    throw ParameterError(std::string(to_string(kind)) + ": missing parameter '" + name + "'");
  }
  return it->second;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void validate(const CorruptionSpec& spec) {
  const std::string name(to_string(spec.kind));
  const auto required = required_params(spec.kind);
  if (spec.params.size() != required.size()) {
    throw ParameterError(name + ": expected " + std::to_string(required.size()) +
                         " parameter(s), got " + std::to_string(spec.params.size()));
  }
  for (const auto& key : required) {
    const double v = spec.param(key);
    if (!std::isfinite(v)) throw ParameterError(name + ": parameter '" + key + "' is not finite");
  }
  if (spec.kind != Kind::compose && !spec.children.empty()) {
    throw ParameterError(name + ": only compose may carry children");
  }
  switch (spec.kind) {
    case Kind::gaussian_noise:
      if (spec.param("sigma") < 0) throw ParameterError("gaussian_noise: sigma must be >= 0");
      break;
    case Kind::poisson_gaussian_noise:
      if (spec.param("a") < 0 || spec.param("b") < 0) {
        throw ParameterError("poisson_gaussian_noise: a and b must be >= 0");
      }
      break;
    case Kind::gaussian_blur:
    case Kind::average_blur:
    case Kind::median_blur: {
      const int k = integral_param(spec, "kernel");
      if (k < kMinBlurKernel || k > kMaxBlurKernel || k % 2 == 0) {
        throw ParameterError(name + ": kernel must be odd and in [3, 31]");
      }
      break;
    }
    case Kind::jpeg: {
      const int q = integral_param(spec, "quality");
      if (q < 1 || q > 100) throw ParameterError("jpeg: quality must be in [1, 100]");
      break;
    }
    case Kind::resize_degrade: {
      const int f = integral_param(spec, "factor");
      if (f != 2 && f != 4 && f != 8 && f != 16) {
        throw ParameterError("resize_degrade: factor must be one of 2, 4, 8, 16");
      }
      break;
    }
    case Kind::gamma:
      if (!(spec.param("g") > 0)) throw ParameterError("gamma: g must be > 0");
      break;
    case Kind::linear_adjust:
      if (!(spec.param("alpha") > 0)) throw ParameterError("linear_adjust: alpha must be > 0");
      break;
    case Kind::compose:
      if (spec.children.size() < 2) {
        throw ParameterError("compose needs at least two children");
      }
      for (const auto& child : spec.children) validate(child);
      break;
    case Kind::unaltered:
      break;
  }
}

std::string default_label(const CorruptionSpec& spec) {
  auto p = [&](const char* key) {
    const auto it = spec.params.find(key);
    return it == spec.params.end() ? std::string("?") : format_number(it->second);
  };
  switch (spec.kind) {
    case Kind::unaltered: return std::string(kUnalteredLabel);
    case Kind::gaussian_noise: return "Gau Noise " + p("sigma");
    case Kind::poisson_gaussian_noise: return "Pois-Gau Noise a" + p("a") + " b" + p("b");
    case Kind::gaussian_blur: return "Gau Blur " + p("kernel");
    case Kind::average_blur: return "Avg Blur " + p("kernel");
    case Kind::median_blur: return "Med Blur " + p("kernel");
    case Kind::jpeg: return "JPEG " + p("quality");
    case Kind::resize_degrade: return "Resize x" + p("factor");
    case Kind::gamma: return "Gamma Corr " + p("g");
    case Kind::linear_adjust: return "Lin Adj a" + p("alpha") + " b" + p("beta");
    case Kind::compose: {
      std::string out;
      for (const auto& child : spec.children) {
        if (!out.empty()) out += " + ";
        out += child.label.empty() ? default_label(child) : child.label;
      }
      return out;
    }
  }
  return "?";
}

CorruptionSpec parse_spec_string(std::string_view text) {
  std::vector<CorruptionSpec> terms;
  while (true) {
    const auto plus = text.find('+');
    terms.push_back(parse_term(text.substr(0, plus)));
    if (plus == std::string_view::npos) break;
    text.remove_prefix(plus + 1);
  }
  if (terms.size() == 1) return std::move(terms.front());
  CorruptionSpec spec{Kind::compose, {}, {}, std::move(terms)};
  spec.label = default_label(spec);
  validate(spec);
  return spec;
}

std::optional<double> severity_of(const CorruptionSpec& spec) {
  switch (spec.kind) {
    case Kind::gaussian_noise: return spec.param("sigma");
    case Kind::poisson_gaussian_noise: return spec.param("a");
    case Kind::gaussian_blur:
    case Kind::average_blur:
    case Kind::median_blur: return spec.param("kernel");
    case Kind::jpeg: return spec.param("quality");
    case Kind::resize_degrade: return spec.param("factor");
    case Kind::gamma: return spec.param("g");
    default: return std::nullopt;
  }
}

Image apply_spec(const Image& img, const CorruptionSpec& spec, RngStream& rng) {
  validate(spec);
  switch (spec.kind) {
    case Kind::unaltered: return img;
    case Kind::gaussian_noise: return gaussian_noise(img, spec.param("sigma"), rng);
    case Kind::poisson_gaussian_noise:
      return poisson_gaussian_noise(img, spec.param("a"), spec.param("b"), rng);
    case Kind::gaussian_blur:
    case Kind::average_blur:
    case Kind::median_blur:
      return blur(img, blur_filter(spec.kind), integral_param(spec, "kernel"));
    case Kind::jpeg: return jpeg_round_trip(img, integral_param(spec, "quality"));
    case Kind::resize_degrade: return resize_degrade(img, integral_param(spec, "factor"));
    case Kind::gamma: return gamma_correct(img, spec.param("g"));
    case Kind::linear_adjust:
      return linear_adjust(img, spec.param("alpha"), spec.param("beta"));
    case Kind::compose: {
      Image out = img;
      for (std::size_t i = 0; i < spec.children.size(); ++i) {
        RngStream sub = rng.substream(std::to_string(i));
        out = apply_spec(out, spec.children[i], sub);
      }
      return out;
    }
  }
  throw ParameterError("apply_spec: unknown kind");
}

bool ends_with_jpeg(const CorruptionSpec& spec) {
  if (spec.kind == Kind::jpeg) return true;
  if (spec.kind == Kind::compose && !spec.children.empty()) {
    return ends_with_jpeg(spec.children.back());
  }
  return false;
}

EncodedImage materialize(const Image& img, const CorruptionSpec& spec, RngStream& rng) {
  validate(spec);
  if (spec.kind == Kind::jpeg) {
    return {encode_jpeg(img, integral_param(spec, "quality")), ImageFormat::jpeg};
  }
  if (spec.kind == Kind::compose && ends_with_jpeg(spec)) {
    Image out = img;
    const std::size_t last = spec.children.size() - 1;
    for (std::size_t i = 0; i < last; ++i) {
      RngStream sub = rng.substream(std::to_string(i));
      out = apply_spec(out, spec.children[i], sub);
    }
    RngStream sub = rng.substream(std::to_string(last));
    return materialize(out, spec.children[last], sub);
  }
  return {encode_png(apply_spec(img, spec, rng)), ImageFormat::png};
}

const CorruptionSpec* SeverityGrid::find(std::string_view label) const {
  for (const auto& cell : cells) {
    if (cell.label == label) return &cell;
  }
  return nullptr;
}

void validate(const SeverityGrid& grid) {
  if (grid.cells.empty() || grid.cells.front().kind != Kind::unaltered ||
      grid.cells.front().label != kUnalteredLabel) {
    throw ParameterError("grid must start with the 'unaltered' cell");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const auto& cell = grid.cells[i];
    if (cell.label.empty()) throw ParameterError("grid cell without a label");
    if (!seen.insert(cell.label).second) {
      throw ParameterError("duplicate grid label '" + cell.label + "'");
    }
    if (i > 0 && cell.kind == Kind::unaltered) {
      throw ParameterError("'unaltered' may only appear as the first cell");
    }
    validate(cell);
  }
}

SeverityGrid builtin_grid() {
  SeverityGrid g;
  auto& c = g.cells;
  c.push_back(leaf(Kind::unaltered, {}));
  for (double q : {95, 60, 30}) c.push_back(leaf(Kind::jpeg, {{"quality", q}}));
  for (double s : {5, 10, 20, 30, 40, 50}) c.push_back(leaf(Kind::gaussian_noise, {{"sigma", s}}));
  c.push_back(labelled(leaf(Kind::poisson_gaussian_noise, {{"a", 0.01}, {"b", 1e-4}}),
                       "Pois-Gau Noise"));
  for (Kind k : {Kind::gaussian_blur, Kind::average_blur, Kind::median_blur}) {
    for (double ks : {3, 7, 11}) c.push_back(leaf(k, {{"kernel", ks}}));
  }
  for (double gm : {0.1, 0.75, 2.5}) c.push_back(leaf(Kind::gamma, {{"g", gm}}));
  const std::array<std::pair<double, double>, 4> linear{{{0.5, 0}, {1.5, 0}, {1, -50}, {1, 50}}};
  for (auto [alpha, beta] : linear) {
    c.push_back(leaf(Kind::linear_adjust, {{"alpha", alpha}, {"beta", beta}}));
  }
  for (double f : {4, 8, 16}) c.push_back(leaf(Kind::resize_degrade, {{"factor", f}}));

  const auto gn = leaf(Kind::gaussian_noise, {{"sigma", 30}});
  const auto gb = leaf(Kind::gaussian_blur, {{"kernel", 7}});
  const auto gc = leaf(Kind::gamma, {{"g", 0.75}});
  const auto jp = leaf(Kind::jpeg, {{"quality", 60}});
  c.push_back(compose("GN+GB", {gn, gb}));
  c.push_back(compose("GB+GN+GC", {gb, gn, gc}));
  // Same order as the augmentation chain: enhancement, blur, noise, JPEG.
  c.push_back(compose("All", {gc, gb, gn, jp}));
  return g;
}

void to_json(nlohmann::json& j, const CorruptionSpec& spec) {
  j = nlohmann::json{{"label", spec.label},
                     {"kind", std::string(to_string(spec.kind))},
                     {"params", spec.params}};
  if (spec.kind == Kind::compose) j["children"] = spec.children;
}

void from_json(const nlohmann::json& j, CorruptionSpec& spec) {
  try {
    spec.kind = parse_kind(j.at("kind").get<std::string>());
    spec.params = j.value("params", std::map<std::string, double>{});
    spec.children = j.value("children", std::vector<CorruptionSpec>{});
    spec.label = j.value("label", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("corruption spec: ") + e.what());
  }
  if (spec.label.empty()) spec.label = default_label(spec);
  validate(spec);
}

void to_json(nlohmann::json& j, const SeverityGrid& grid) {
  j = nlohmann::json{{"cells", grid.cells}};
}

void from_json(const nlohmann::json& j, SeverityGrid& grid) {
  try {
    grid.cells = j.at("cells").get<std::vector<CorruptionSpec>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("severity grid: ") + e.what());
  }
  if (grid.cells.empty() || grid.cells.front().kind != Kind::unaltered) {
    grid.cells.insert(grid.cells.begin(), leaf(Kind::unaltered, {}));
  }
  validate(grid);
}

SeverityGrid load_grid(const std::string& source) {
  if (source == "builtin") return builtin_grid();
  std::ifstream in(source);
  if (!in) throw IoError("cannot open grid file " + source);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("grid file " + source + ": " + e.what());
  }
  return j.get<SeverityGrid>();
}

void save_grid(const SeverityGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << nlohmann::json(grid).dump(2) << '\n';
}

}  // namespace rdeg
