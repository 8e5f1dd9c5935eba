#include "rdeg/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "rdeg/codec.hpp"
#include "rdeg/error.hpp"
#include "rdeg/parallel.hpp"

namespace rdeg {
namespace {

namespace fs = std::filesystem;

constexpr const char* kCsvHeader = "detector,cell,n,acc,auc,f1,seed";

// Re-throws the in-flight library error with the cell label prefixed,
// keeping its dynamic type so callers can still map it to an exit status.
[[noreturn]] void rethrow_in_cell(const std::string& label) {
  const std::string prefix = "cell '" + label + "': ";
  try {
    throw;
  } catch (const DetectorError& e) {
    throw DetectorError(prefix + e.what(), e.completed());
  } catch (const ProtocolError& e) {
    throw ProtocolError(prefix + e.what());
  } catch (const IoError& e) {
    throw IoError(prefix + e.what());
  } catch (const FormatError& e) {
    throw FormatError(prefix + e.what());
  } catch (const MetricError& e) {
    throw MetricError(prefix + e.what());
  } catch (const ParameterError& e) {
    throw ParameterError(prefix + e.what());
  } catch (const Error& e) {
    throw Error(prefix + e.what());
  }
}

double parse_number(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw FormatError("report line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw FormatError("report line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  }
  return v;
}

std::vector<ReportRow> read_csv_report(std::istream& in, const fs::path& path) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<ReportRow> rows;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header) {
      if (line != kCsvHeader) {
        throw FormatError(path.string() + ": expected header '" + kCsvHeader + "'");
      }
      header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto f = csv::split<FormatError>(line, line_no);
    if (f.size() != 7) {
      throw FormatError(path.string() + " line " + std::to_string(line_no) +
                        ": expected 7 fields");
    }
    ReportRow r;
    r.detector = f[0];
    r.cell = f[1];
    r.n = parse_u64(f[2], line_no);
    r.acc = parse_number(f[3], line_no);
    r.auc = parse_number(f[4], line_no);
    r.f1 = parse_number(f[5], line_no);
    r.seed = parse_u64(f[6], line_no);
    rows.push_back(std::move(r));
  }
  if (!header) throw FormatError(path.string() + ": empty report");
  return rows;
}

fs::path resolve_against(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

}  // namespace

void to_json(nlohmann::json& j, const ReportRow& r) {
  j = nlohmann::json{{"detector", r.detector}, {"cell", r.cell}, {"n", r.n},
                     {"acc", r.acc},           {"auc", r.auc},   {"f1", r.f1},
                     {"seed", r.seed},         {"failed", r.failed}};
}

void from_json(const nlohmann::json& j, ReportRow& r) {
  r.detector = j.at("detector").get<std::string>();
  r.cell = j.at("cell").get<std::string>();
  r.n = j.at("n").get<std::size_t>();
  r.acc = j.at("acc").get<double>();
  r.auc = j.at("auc").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.failed = j.value("failed", std::size_t{0});
}

std::string safe_name(std::string_view text) {
  std::string out(text);
  for (char& ch : out) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '.' || ch == '_' || ch == '-';
    if (!ok) ch = '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

std::vector<ReportRow> run_grid(const std::vector<ManifestEntry>& manifest,
                                const SeverityGrid& grid, const DetectorEndpoint& detector,
                                const RunOptions& options) {
  validate(grid);
  validate(detector);
  if (manifest.empty()) throw ManifestError("manifest is empty");

  std::map<std::string, Label> labels;
  std::set<std::string> stems;
  for (const auto& e : manifest) {
    if (!labels.emplace(e.item_id, e.label).second) {
      throw ManifestError("duplicate id '" + e.item_id + "'");
    }
    if (!stems.insert(safe_name(e.item_id)).second) {
      throw ManifestError("ids collide after file-name sanitising: '" + e.item_id + "'");
    }
  }
  {
    std::set<std::string> dirs;
    for (const auto& cell : grid.cells) {
      if (!dirs.insert(safe_name(cell.label)).second) {
        throw ParameterError("grid labels collide after sanitising: '" + cell.label + "'");
      }
    }
  }

  std::vector<Image> originals(manifest.size());
  parallel_for(manifest.size(), options.jobs,
               [&](std::size_t i) { originals[i] = load_image(manifest[i].path); });

  std::vector<ReportRow> rows(grid.cells.size());
  parallel_for(grid.cells.size(), options.jobs, [&](std::size_t c) {
    const CorruptionSpec& cell = grid.cells[c];
    try {
      std::vector<ImageRequest> requests;
      requests.reserve(manifest.size());
      if (cell.kind == CorruptionKind::unaltered) {
        for (const auto& e : manifest) requests.emplace_back(e.item_id, e.path);
      } else {
        const fs::path dir = options.workdir / safe_name(cell.label);
        fs::create_directories(dir);
        for (std::size_t i = 0; i < manifest.size(); ++i) {
          RngStream rng = derive_rng(options.seed, manifest[i].item_id, cell.label);
          const EncodedImage enc = materialize(originals[i], cell, rng);
          fs::path out = dir / (safe_name(manifest[i].item_id) + "." +
                                std::string(extension(enc.format)));
          write_file(out, enc.bytes);
          requests.emplace_back(manifest[i].item_id, std::move(out));
        }
      }
      const ScoreResult scored = score_images(detector, requests);
      std::vector<ScoredSample> samples;
      samples.reserve(scored.scores.size());
      for (const auto& [id, score] : scored.scores) samples.push_back({labels.at(id), score});
      const EvalMetrics m = evaluate(samples, options.threshold);
      rows[c] = ReportRow{detector.display_name(), cell.label, samples.size(), m.acc,
                          m.auc, m.f1, options.seed, scored.failed.size()};
    } catch (const Error&) {
      rethrow_in_cell(cell.label);
    } catch (const fs::filesystem_error& e) {
      throw IoError("cell '" + cell.label + "': " + e.what());
    }
  });
  return rows;
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                 const fs::path& path) {
  if (rows.empty()) throw ParameterError("emit_report: no rows");
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
      out << csv::quote(r.detector) << ',' << csv::quote(r.cell) << ',' << r.n << ','
          << format_number(r.acc) << ',' << format_number(r.auc) << ','
          << format_number(r.f1) << ',' << r.seed << '\n';
    }
  } else {
    out << nlohmann::json(rows).dump(2) << '\n';
  }
  const std::string text = out.str();
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<ReportRow> read_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report " + path.string());
  const int first = (in >> std::ws).peek();
  if (first == '[' || first == '{') {
    try {
      nlohmann::json j;
      in >> j;
      if (j.is_object()) j = j.at("rows");
      return j.get<std::vector<ReportRow>>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  return read_csv_report(in, path);
}

std::vector<SweepPoint> sweep_points(const std::vector<ReportRow>& rows,
                                     const SeverityGrid& grid,
                                     const std::optional<CorruptionKind>& kind) {
  struct Keyed {
    std::size_t series_rank;
    std::size_t kind_rank;
    SweepPoint point;
  };
  std::vector<std::string> series_order;
  std::map<CorruptionKind, std::size_t> kind_rank;
  for (const auto& cell : grid.cells) kind_rank.emplace(cell.kind, kind_rank.size());

  std::vector<Keyed> keyed;
  for (const auto& r : rows) {
    const CorruptionSpec* cell = grid.find(r.cell);
    if (cell == nullptr) continue;
    const auto severity = severity_of(*cell);
    if (!severity || (kind && cell->kind != *kind)) continue;
    auto it = std::find(series_order.begin(), series_order.end(), r.detector);
    if (it == series_order.end()) it = series_order.insert(series_order.end(), r.detector);
    keyed.push_back({static_cast<std::size_t>(it - series_order.begin()),
                     kind_rank.at(cell->kind),
                     {r.detector, std::string(to_string(cell->kind)), r.cell, *severity, r.auc}});
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.series_rank != b.series_rank) return a.series_rank < b.series_rank;
    if (a.kind_rank != b.kind_rank) return a.kind_rank < b.kind_rank;
    return a.point.severity < b.point.severity;
  });
  std::vector<SweepPoint> out;
  out.reserve(keyed.size());
  for (auto& k : keyed) out.push_back(std::move(k.point));
  return out;
}

std::string format_sweep(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "series,kind,cell,severity,auc\n";
  for (const auto& p : points) {
    out << csv::quote(p.series) << ',' << p.kind << ',' << csv::quote(p.cell) << ','
        << format_number(p.severity) << ',' << format_number(p.auc) << '\n';
  }
  return out.str();
}

void write_sweep(const std::vector<SweepPoint>& points, const fs::path& path) {
  const std::string text = format_sweep(points);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

fs::path sweep_path_for(const fs::path& report) {
  fs::path out = report;
  out.replace_filename(report.stem().string() + "_sweep.csv");
  return out;
}

BenchConfig load_bench_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  const fs::path base = path.parent_path();
  BenchConfig cfg;
  try {
    nlohmann::json j;
    in >> j;
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.grid = j.value("grid", std::string("builtin"));
    if (cfg.grid != "builtin") cfg.grid = resolve_against(base, cfg.grid).string();
    cfg.manifest = resolve_against(base, j.at("manifest").get<std::string>());

    const auto& d = j.at("detector");
    cfg.detector.command = d.at("command").get<std::vector<std::string>>();
    if (!cfg.detector.command.empty()) {
      fs::path prog = cfg.detector.command.front();
      if (prog.has_parent_path() && prog.is_relative()) {
        cfg.detector.command.front() = (base / prog).string();
      }
    }
    cfg.detector.timeout_s = d.value("timeout", cfg.detector.timeout_s);
    cfg.detector.batch_size = d.value("batch_size", cfg.detector.batch_size);
    cfg.detector.name = d.value("name", std::string{});

    if (j.contains("workdir")) {
      cfg.workdir = resolve_against(base, j.at("workdir").get<std::string>());
    } else if (const char* env = std::getenv("RDEG_WORKDIR"); env && *env) {
      cfg.workdir = env;
    } else {
      cfg.workdir = "rdeg-work";
    }

    if (j.contains("threshold")) {
      const auto& t = j.at("threshold");
      if (t.is_string() && t.get<std::string>() == "youden") {
        cfg.threshold = YoudenThreshold{};
      } else if (t.is_number()) {
        cfg.threshold = FixedThreshold{t.get<double>()};
      } else {
        throw ParameterError("threshold must be a number or \"youden\"");
      }
    }
    cfg.report = resolve_against(base, j.value("report", std::string("report.csv")));
    const std::string format = j.value("format", std::string("csv"));
    if (format == "csv") {
      cfg.format = ReportFormat::csv;
    } else if (format == "json") {
      cfg.format = ReportFormat::json;
    } else {
      throw ParameterError("format must be csv or json");
    }
    cfg.jobs = j.value("jobs", std::size_t{1});
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("config " + path.string() + ": " + e.what());
  }
  validate(cfg.detector);
  return cfg;
}

}  // namespace rdeg
