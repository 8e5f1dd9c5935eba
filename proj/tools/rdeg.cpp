// rdeg: batch front end for corruption, augmentation and robustness benchmarks.
//
// Exit status: 0 success, 1 internal error, 2 input error, 3 detector or
// protocol error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdeg/augment.hpp"
#include "rdeg/codec.hpp"
#include "rdeg/error.hpp"
#include "rdeg/harness.hpp"
#include "rdeg/manifest.hpp"
#include "rdeg/parallel.hpp"
#include "rdeg/spec.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitDetector = 3;

struct InputItem {
  std::string id;
  fs::path path;
};

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

// A directory contributes its image files (sorted, id = file stem); anything
// else is read as a manifest.
std::vector<InputItem> collect_inputs(const fs::path& input) {
  if (!fs::exists(input)) throw rdeg::IoError("input not found: " + input.string());
  std::vector<InputItem> items;
  if (fs::is_directory(input)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(input)) {
      if (e.is_regular_file() && is_image_file(e.path())) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::set<std::string> ids;
    for (const auto& f : files) {
      const std::string id = f.stem().string();
      if (!ids.insert(id).second) {
        throw rdeg::ParameterError("two input files share the id '" + id + "'");
      }
      items.push_back({id, f});
    }
  } else {
    for (auto& e : rdeg::load_manifest(input)) items.push_back({e.item_id, e.path});
  }
  if (items.empty()) throw rdeg::IoError("no input images in " + input.string());
  std::set<std::string> stems;
  for (const auto& it : items) {
    if (!stems.insert(rdeg::safe_name(it.id)).second) {
      throw rdeg::ParameterError("ids collide after file-name sanitising: '" + it.id + "'");
    }
  }
  return items;
}

int cmd_corrupt(const std::string& input, const std::string& spec_text,
                const std::string& grid_source, std::uint64_t seed, const std::string& out,
                std::size_t jobs) {
  std::vector<rdeg::CorruptionSpec> cells;
  if (!spec_text.empty()) {
    cells.push_back(rdeg::parse_spec_string(spec_text));
  } else {
    for (auto& c : rdeg::load_grid(grid_source).cells) {
      if (c.kind != rdeg::CorruptionKind::unaltered) cells.push_back(std::move(c));
    }
  }
  const auto items = collect_inputs(input);
  std::vector<rdeg::Image> originals(items.size());
  rdeg::parallel_for(items.size(), jobs,
                     [&](std::size_t i) { originals[i] = rdeg::load_image(items[i].path); });

  for (const auto& cell : cells) fs::create_directories(fs::path(out) / rdeg::safe_name(cell.label));
  rdeg::parallel_for(cells.size() * items.size(), jobs, [&](std::size_t k) {
    const auto& cell = cells[k / items.size()];
    const std::size_t i = k % items.size();
    rdeg::RngStream rng = rdeg::derive_rng(seed, items[i].id, cell.label);
    const auto enc = rdeg::materialize(originals[i], cell, rng);
    rdeg::write_file(fs::path(out) / rdeg::safe_name(cell.label) /
                         (rdeg::safe_name(items[i].id) + "." + std::string(rdeg::extension(enc.format))),
                     enc.bytes);
  });
  for (const auto& cell : cells) {
    std::printf("%s: %zu file(s) -> %s\n", cell.label.c_str(), items.size(),
                (fs::path(out) / rdeg::safe_name(cell.label)).string().c_str());
  }
  return kExitOk;
}

int cmd_augment(const std::string& input, const std::string& preset, const std::string& config,
                std::uint64_t seed, const std::string& out, const std::string& trace_path,
                std::size_t jobs) {
  rdeg::AugmentConfig cfg = rdeg::augment_preset(preset);
  if (!config.empty()) {
    std::ifstream in(config);
    if (!in) throw rdeg::IoError("cannot open augment config " + config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw rdeg::ParameterError("augment config " + config + ": " + e.what());
    }
    cfg = j.get<rdeg::AugmentConfig>();
  }
  rdeg::validate(cfg);
  const auto items = collect_inputs(input);
  fs::create_directories(out);

  std::vector<rdeg::AugmentTrace> traces(items.size());
  rdeg::parallel_for(items.size(), jobs, [&](std::size_t i) {
    const rdeg::Image img = rdeg::load_image(items[i].path);
    rdeg::RngStream rng = rdeg::derive_rng(seed, items[i].id, "augment");
    traces[i] = rdeg::sample_chain(cfg, rng);
    const auto enc = rdeg::apply_trace_encoded(img, traces[i], rng);
    rdeg::write_file(fs::path(out) / (rdeg::safe_name(items[i].id) + "." +
                                      std::string(rdeg::extension(enc.format))),
                     enc.bytes);
  });

  const fs::path trace_file = trace_path.empty() ? fs::path(out) / "trace.jsonl" : fs::path(trace_path);
  std::ofstream tf(trace_file);
  if (!tf) throw rdeg::IoError("cannot write trace file " + trace_file.string());
  std::size_t counts[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < items.size(); ++i) {
    nlohmann::json line = nlohmann::json{{"id", items[i].id}};
    line.update(nlohmann::json(traces[i]));
    tf << line.dump() << '\n';
    counts[0] += traces[i].enh_applied;
    counts[1] += traces[i].blur_applied;
    counts[2] += traces[i].noise_applied;
    counts[3] += traces[i].jpeg_applied;
  }
  if (!tf) throw rdeg::IoError("write failed: " + trace_file.string());
  std::printf("augmented %zu image(s) [%s]: enh %zu, blur %zu, noise %zu, jpeg %zu\n",
              items.size(), std::string(rdeg::to_string(cfg.mode)).c_str(), counts[0],
              counts[1], counts[2], counts[3]);
  return kExitOk;
}

void print_auc_table(const std::vector<rdeg::ReportRow>& rows) {
  std::size_t width = 4;
  for (const auto& r : rows) width = std::max(width, r.cell.size());
  std::printf("%-*s  %8s  %6s\n", static_cast<int>(width), "cell", "AUC (%)", "n");
  for (const auto& r : rows) {
    std::printf("%-*s  %8.2f  %6zu%s\n", static_cast<int>(width), r.cell.c_str(), 100.0 * r.auc,
                r.n, r.failed ? ("  (" + std::to_string(r.failed) + " failed)").c_str() : "");
  }
}

int cmd_bench(const std::string& config_path, std::optional<std::size_t> jobs) {
  rdeg::BenchConfig cfg = rdeg::load_bench_config(config_path);
  if (jobs) cfg.jobs = *jobs;
  const auto manifest = rdeg::load_manifest(cfg.manifest);
  const auto grid = rdeg::load_grid(cfg.grid);
  rdeg::RunOptions options{cfg.seed, cfg.workdir, cfg.threshold, cfg.jobs};
  const auto rows = rdeg::run_grid(manifest, grid, cfg.detector, options);
  rdeg::emit_report(rows, cfg.format, cfg.report);
  rdeg::write_sweep(rdeg::sweep_points(rows, grid), rdeg::sweep_path_for(cfg.report));
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.failed;
  print_auc_table(rows);
  if (failed > 0) {
    std::fprintf(stderr, "warning: %zu item(s) excluded after detector timeouts\n", failed);
  }
  std::printf("report: %s\n", cfg.report.string().c_str());
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& files, const std::string& sweep,
               const std::string& grid_source, const std::string& out) {
  if (files.empty()) throw rdeg::ParameterError("report: no input files");
  const auto grid = rdeg::load_grid(grid_source);
  std::optional<rdeg::CorruptionKind> kind;
  if (!sweep.empty()) kind = rdeg::parse_kind(sweep);

  std::vector<std::vector<rdeg::ReportRow>> reports;
  for (const auto& f : files) reports.push_back(rdeg::read_report(f));

  // Reports merge only when they were produced on the same grid.
  auto cells_of = [](const std::vector<rdeg::ReportRow>& rows, const std::string& detector) {
    std::vector<std::string> cells;
    for (const auto& r : rows)
      if (r.detector == detector) cells.push_back(r.cell);
    return cells;
  };
  std::optional<std::vector<std::string>> reference;
  std::map<std::string, int> name_uses;
  for (const auto& rows : reports) {
    std::set<std::string> names;
    for (const auto& r : rows) names.insert(r.detector);
    for (const auto& n : names) {
      ++name_uses[n];
      const auto cells = cells_of(rows, n);
      if (!reference) {
        reference = cells;
      } else if (*reference != cells) {
        throw rdeg::MergeError("reports were produced on different grids");
      }
    }
    for (const auto& r : rows) {
      if (grid.find(r.cell) == nullptr) {
        throw rdeg::MergeError("cell '" + r.cell + "' is not part of grid '" + grid_source + "'");
      }
    }
  }

  std::vector<rdeg::ReportRow> merged;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (auto r : reports[i]) {
      if (name_uses[r.detector] > 1) r.detector += "@" + fs::path(files[i]).stem().string();
      merged.push_back(std::move(r));
    }
  }
  const auto points = rdeg::sweep_points(merged, grid, kind);
  if (out.empty() || out == "-") {
    std::cout << rdeg::format_sweep(points);
  } else {
    rdeg::write_sweep(points, out);
  }
  return kExitOk;
}

int run_guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const rdeg::DetectorError& e) {
    std::fprintf(stderr, "rdeg: detector error: %s\n", e.what());
    return kExitDetector;
  } catch (const rdeg::ProtocolError& e) {
    std::fprintf(stderr, "rdeg: protocol error: %s\n", e.what());
    return kExitDetector;
  } catch (const rdeg::Error& e) {
    std::fprintf(stderr, "rdeg: %s\n", e.what());
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "rdeg: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rdeg: internal error: %s\n", e.what());
    return kExitInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Realistic image degradation and detector robustness benchmarking"};
  app.require_subcommand(1);

  std::size_t jobs = 1;
  std::uint64_t seed = 0;

  auto* corrupt = app.add_subcommand("corrupt", "Write corrupted copies of input images");
  std::string c_input, c_spec, c_grid, c_out;
  corrupt->add_option("-i,--input", c_input, "Image directory or manifest CSV")->required();
  auto* spec_opt = corrupt->add_option("--spec", c_spec, "Single corruption, e.g. gamma:g=0.75");
  auto* grid_opt = corrupt->add_option("--grid", c_grid, "'builtin' or a grid JSON file");
  spec_opt->excludes(grid_opt);
  corrupt->add_option("--seed", seed, "Master seed");
  corrupt->add_option("-o,--out", c_out, "Output directory")->required();
  corrupt->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* augment = app.add_subcommand("augment", "Apply the stochastic augmentation chain");
  std::string a_input, a_preset = "paper-default", a_config, a_out, a_trace;
  augment->add_option("-i,--input", a_input, "Image directory or manifest CSV")->required();
  augment->add_option("--preset", a_preset, "paper-default | gn-only | non-stochastic");
  augment->add_option("--config", a_config, "AugmentConfig JSON (overrides --preset)");
  augment->add_option("--seed", seed, "Master seed");
  augment->add_option("-o,--out", a_out, "Output directory")->required();
  augment->add_option("--trace", a_trace, "JSON-lines trace file (default <out>/trace.jsonl)");
  augment->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "Score a detector over a corruption grid");
  std::string b_config;
  bench->add_option("-c,--config", b_config, "Bench config JSON")->required();
  auto* b_jobs = bench->add_option("-j,--jobs", jobs, "Worker threads (overrides config)")
                     ->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "Merge reports into a severity-sweep CSV");
  std::vector<std::string> r_files;
  std::string r_sweep, r_grid = "builtin", r_out;
  report->add_option("reports", r_files, "Report files (CSV or JSON)");
  report->add_option("--sweep", r_sweep, "Restrict to one corruption kind, e.g. gaussian_noise");
  report->add_option("--grid", r_grid, "Grid the reports were produced with");
  report->add_option("-o,--out", r_out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  if (corrupt->parsed()) {
    if (c_spec.empty() && c_grid.empty()) c_grid = "builtin";
    return run_guarded([&] { return cmd_corrupt(c_input, c_spec, c_grid, seed, c_out, jobs); });
  }
  if (augment->parsed()) {
    return run_guarded(
        [&] { return cmd_augment(a_input, a_preset, a_config, seed, a_out, a_trace, jobs); });
  }
  if (bench->parsed()) {
    std::optional<std::size_t> j;
    if (b_jobs->count() > 0) j = jobs;
    return run_guarded([&] { return cmd_bench(b_config, j); });
  }
  if (report->parsed()) {
    if (r_files.empty()) {
      std::fprintf(stderr, "rdeg report: at least one report file is required\n%s",
                   report->help().c_str());
      return kExitInput;
    }
    return run_guarded([&] { return cmd_report(r_files, r_sweep, r_grid, r_out); });
  }
  return kExitInternal;
}
