#include <gtest/gtest.h>

#include <fstream>

#include "rdeg/error.hpp"
#include "rdeg/harness.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

namespace rdeg {
namespace {

using testing::TempDir;

DetectorEndpoint toy() {
  DetectorEndpoint ep;
  ep.command = {RDEG_TOY_DETECTOR};
  return ep;
}

SeverityGrid small_grid() {
  SeverityGrid g;
  g.cells.push_back(parse_spec_string("unaltered"));
  g.cells.back().label = std::string(kUnalteredLabel);
  g.cells.push_back(parse_spec_string("gamma:g=1"));
  g.cells.push_back(parse_spec_string("gaussian_blur:kernel=11"));
  g.cells.push_back(parse_spec_string("gaussian_noise:sigma=10+jpeg:quality=50"));
  return g;
}

std::size_t count_files(const std::filesystem::path& dir) {
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) n += e.is_regular_file();
  return n;
}

TEST(HarnessTest, SafeName) {
  EXPECT_EQ(safe_name("Gau Noise 30"), "Gau_Noise_30");
  EXPECT_EQ(safe_name("GB+GN+GC"), "GB_GN_GC");
  EXPECT_EQ(safe_name("a/b.c-d_e"), "a_b.c-d_e");
}

TEST(HarnessTest, IdentityCellMatchesUnaltered) {
  TempDir dir;
  const auto manifest = load_manifest(synth::write_separable_corpus(dir / "corpus", 12, 48, 1));
  RunOptions opt;
  opt.seed = 3;
  opt.workdir = dir / "work";
  const auto rows = run_grid(manifest, small_grid(), toy(), opt);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].cell, "unaltered");
  EXPECT_EQ(rows[0].auc, 1.0);
  EXPECT_EQ(rows[0].n, 12u);
  EXPECT_EQ(rows[0].detector, "toy_detector");
  EXPECT_EQ(rows[0].seed, 3u);
  EXPECT_EQ(rows[1].acc, rows[0].acc);
  EXPECT_EQ(rows[1].auc, rows[0].auc);
  EXPECT_EQ(rows[1].f1, rows[0].f1);
  EXPECT_LT(rows[2].auc, 1.0);

  EXPECT_FALSE(std::filesystem::exists(opt.workdir / "unaltered"));
  EXPECT_EQ(count_files(opt.workdir / "Gamma_Corr_1"), 12u);
  EXPECT_EQ(count_files(opt.workdir / "Gau_Blur_11"), 12u);
  EXPECT_TRUE(std::filesystem::exists(opt.workdir / "Gau_Noise_10___JPEG_50" / "fake_1.jpg"));
}

TEST(HarnessTest, ToyDetectorLosesAucUnderStrongNoiseAndBlur) {
  TempDir dir;
  const auto manifest = load_manifest(synth::write_separable_corpus(dir / "corpus", 20, 64, 1));
  SeverityGrid grid;
  grid.cells = {parse_spec_string("unaltered"), parse_spec_string("gaussian_noise:sigma=50"),
                parse_spec_string("gaussian_blur:kernel=11")};
  grid.cells[0].label = std::string(kUnalteredLabel);
  RunOptions opt;
  opt.seed = 1;
  opt.workdir = dir / "work";
  const auto rows = run_grid(manifest, grid, toy(), opt);
  EXPECT_EQ(rows[0].auc, 1.0);
  EXPECT_LT(rows[1].auc, rows[0].auc);
  EXPECT_LT(rows[2].auc, rows[0].auc);
}

TEST(HarnessTest, RerunsAndThreadCountsAgree) {
  TempDir dir;
  const auto manifest = load_manifest(synth::write_separable_corpus(dir / "corpus", 10, 40, 2));
  RunOptions opt;
  opt.seed = 11;
  opt.workdir = dir / "w1";
  const auto a = run_grid(manifest, small_grid(), toy(), opt);
  opt.workdir = dir / "w2";
  const auto b = run_grid(manifest, small_grid(), toy(), opt);
  opt.workdir = dir / "w3";
  opt.jobs = 8;
  const auto c = run_grid(manifest, small_grid(), toy(), opt);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  emit_report(a, ReportFormat::csv, dir / "a.csv");
  emit_report(c, ReportFormat::csv, dir / "c.csv");
  EXPECT_EQ(testing::slurp(dir / "a.csv"), testing::slurp(dir / "c.csv"));
  for (const char* cell : {"Gau_Blur_11", "Gau_Noise_10___JPEG_50"}) {
    for (const auto& e : std::filesystem::directory_iterator(dir / "w1" / cell)) {
      ASSERT_EQ(testing::slurp(e.path()), testing::slurp(dir / "w3" / cell / e.path().filename()));
    }
  }
}

TEST(HarnessTest, TimedOutItemsAreExcludedAndCounted) {
  TempDir dir;
  const auto manifest = load_manifest(synth::write_separable_corpus(dir / "corpus", 6, 24, 1));
  SeverityGrid grid;
  grid.cells.push_back(parse_spec_string("unaltered"));
  grid.cells.back().label = std::string(kUnalteredLabel);
  DetectorEndpoint ep;
  ep.command = {RDEG_FAKE_ENDPOINT, "hang-on", "fake_3"};
  ep.timeout_s = 1;
  RunOptions opt;
  opt.workdir = dir / "work";
  const auto rows = run_grid(manifest, grid, ep, opt);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].n, 5u);
  EXPECT_EQ(rows[0].failed, 1u);
}

TEST(HarnessTest, ErrorsNameTheCell) {
  TempDir dir;
  const auto manifest = load_manifest(synth::write_separable_corpus(dir / "corpus", 4, 24, 1));
  DetectorEndpoint ep;
  ep.command = {RDEG_FAKE_ENDPOINT, "score", "1.5", "real_0"};
  RunOptions opt;
  opt.workdir = dir / "work";
  try {
    run_grid(manifest, small_grid(), ep, opt);
    FAIL() << "expected ProtocolError";
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("cell 'unaltered'"), std::string::npos) << e.what();
  }
}

TEST(HarnessTest, ReportFormats) {
  TempDir dir;
  const std::vector<ReportRow> rows{{"det", "unaltered", 10, 0.9, 0.95, 0.8, 7, 0},
                                    {"det", "JPEG 60", 10, 0.7, 0.1 + 0.2, 2.0 / 3.0, 7, 2}};
  emit_report(rows, ReportFormat::csv, dir / "r.csv");
  const std::string csv = testing::slurp(dir / "r.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "detector,cell,n,acc,auc,f1,seed");
  auto back = read_report(dir / "r.csv");
  ASSERT_EQ(back.size(), 2u);
  // CSV carries no failed column.
  EXPECT_EQ(back[1].failed, 0u);
  back[1].failed = 2;
  EXPECT_EQ(back, rows);

  emit_report(rows, ReportFormat::json, dir / "r.json");
  EXPECT_EQ(read_report(dir / "r.json"), rows);
  const auto j = nlohmann::json::parse(testing::slurp(dir / "r.json"));
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j[1]["cell"], "JPEG 60");
}

TEST(HarnessTest, SweepForNoiseAxis) {
  const SeverityGrid grid = builtin_grid();
  std::vector<ReportRow> rows;
  // Reverse order on purpose: the sweep sorts by severity.
  for (auto it = grid.cells.rbegin(); it != grid.cells.rend(); ++it) {
    rows.push_back({"det", it->label, 4, 0.5, 0.5, 0.5, 1, 0});
  }
  const auto pts = sweep_points(rows, grid, CorruptionKind::gaussian_noise);
  ASSERT_EQ(pts.size(), 6u);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LT(pts[i - 1].severity, pts[i].severity);
  EXPECT_EQ(pts.front().cell, "Gau Noise 5");
  EXPECT_EQ(pts.back().severity, 50.0);

  const std::string text = format_sweep(pts);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  EXPECT_EQ(text.substr(0, text.find('\n')), "series,kind,cell,severity,auc");

  const auto all = sweep_points(rows, grid);
  for (const auto& p : all) {
    EXPECT_NE(p.kind, "compose");
    EXPECT_NE(p.kind, "linear_adjust");
    EXPECT_NE(p.cell, "unaltered");
  }
  EXPECT_EQ(sweep_path_for("out/report.csv"), std::filesystem::path("out/report_sweep.csv"));
}

TEST(HarnessTest, BenchConfigResolvesRelativePaths) {
  TempDir dir;
  std::ofstream(dir / "bench.json") << R"({"seed": 9, "manifest": "data/m.csv",
    "detector": {"command": ["det", "--fast"], "timeout": 5, "batch_size": 4},
    "workdir": "work", "threshold": "youden", "report": "out/r.json", "format": "json", "jobs": 2})";
  const BenchConfig cfg = load_bench_config(dir / "bench.json");
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.grid, "builtin");
  EXPECT_EQ(cfg.manifest, dir / "data/m.csv");
  EXPECT_EQ(cfg.workdir, dir / "work");
  EXPECT_EQ(cfg.report, dir / "out/r.json");
  EXPECT_EQ(cfg.format, ReportFormat::json);
  EXPECT_TRUE(std::holds_alternative<YoudenThreshold>(cfg.threshold));
  EXPECT_EQ(cfg.detector.command, (std::vector<std::string>{"det", "--fast"}));
  EXPECT_EQ(cfg.detector.batch_size, 4u);
  EXPECT_EQ(cfg.jobs, 2u);

  std::ofstream(dir / "bad.json") << R"({"seed": 1})";
  EXPECT_THROW(load_bench_config(dir / "bad.json"), ParameterError);
}

}  // namespace
}  // namespace rdeg
