#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdeg/endpoint.hpp"
#include "rdeg/manifest.hpp"
#include "rdeg/metrics.hpp"
#include "rdeg/spec.hpp"

namespace rdeg {

/// One grid cell's result for one detector.
struct ReportRow {
  std::string detector;
  std::string cell;
  std::size_t n = 0;       ///< items actually scored
  double acc = 0.0;
  double auc = 0.0;
  double f1 = 0.0;
  std::uint64_t seed = 0;
  std::size_t failed = 0;  ///< items excluded after a detector timeout

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

void to_json(nlohmann::json& j, const ReportRow& row);
void from_json(const nlohmann::json& j, ReportRow& row);

struct RunOptions {
  std::uint64_t seed = 0;
  std::filesystem::path workdir = "rdeg-work";
  ThresholdPolicy threshold = FixedThreshold{};
  std::size_t jobs = 1;
};

/// File-system safe stem for an id or label: characters outside
/// [A-Za-z0-9._-] become '_'.
std::string safe_name(std::string_view text);

/// Corrupts every manifest image for every grid cell, scores the results and
/// returns one row per cell in grid order.
///
/// The rng for an item in a cell is derive_rng(seed, item_id, cell.label).
/// Files land in workdir/<safe_name(label)>/<safe_name(item_id)>.<png|jpg>;
/// the "unaltered" cell scores the original files and writes nothing. Cells
/// run on `jobs` threads, each with its own detector process; rows are
/// identical to a serial run. Errors carry the failing cell's label.
std::vector<ReportRow> run_grid(const std::vector<ManifestEntry>& manifest,
                                const SeverityGrid& grid, const DetectorEndpoint& detector,
                                const RunOptions& options);

enum class ReportFormat { csv, json };

/// CSV columns: detector,cell,n,acc,auc,f1,seed. JSON: array of row objects.
/// Numbers use the shortest round-trip form so reading a report back yields
/// the same rows.
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                 const std::filesystem::path& path);

/// Sniffs CSV vs JSON from the content.
std::vector<ReportRow> read_report(const std::filesystem::path& path);

/// Long-format severity sweep: series,kind,cell,severity,auc. Rows whose cell
/// has a single severity parameter are kept (optionally only one kind),
/// grouped per series then kind, severity ascending. Series name is the
/// row's detector.
struct SweepPoint {
  std::string series;
  std::string kind;
  std::string cell;
  double severity = 0.0;
  double auc = 0.0;
};

std::vector<SweepPoint> sweep_points(const std::vector<ReportRow>& rows,
                                     const SeverityGrid& grid,
                                     const std::optional<CorruptionKind>& kind = std::nullopt);

std::string format_sweep(const std::vector<SweepPoint>& points);
void write_sweep(const std::vector<SweepPoint>& points, const std::filesystem::path& path);

/// Companion file name used next to a report: "<stem>_sweep.csv".
std::filesystem::path sweep_path_for(const std::filesystem::path& report);

/// Everything a bench run needs; loaded from a JSON config file:
///   {"seed": 7, "grid": "builtin" | "<file>", "manifest": "<csv>",
///    "detector": {"command": [...], "timeout": 60, "batch_size": 16, "name": "..."},
///    "workdir": "<dir>", "threshold": 0.5 | "youden",
///    "report": "<file>", "format": "csv" | "json", "jobs": 1}
/// Relative paths resolve against the config file's directory; workdir falls
/// back to $RDEG_WORKDIR, then "rdeg-work".
struct BenchConfig {
  std::uint64_t seed = 0;
  std::string grid = "builtin";
  std::filesystem::path manifest;
  DetectorEndpoint detector;
  std::filesystem::path workdir;
  ThresholdPolicy threshold = FixedThreshold{};
  std::filesystem::path report;
  ReportFormat format = ReportFormat::csv;
  std::size_t jobs = 1;
};

BenchConfig load_bench_config(const std::filesystem::path& path);

}  // namespace rdeg
