#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tmfa/cli.hpp"

using namespace tmfa;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

namespace fs = std::filesystem;

/// Fresh output directory per test case, removed on destruction.
struct OutDir {
  fs::path path;

  OutDir() : path(fs::temp_directory_path() / ("tmfa_cli_" + std::to_string(counter()++))) {
    fs::remove_all(path);
  }
  ~OutDir() { fs::remove_all(path); }

  static int& counter() {
    static int n = 0;
    return n;
  }

  RunConfig config(const std::string& overlay = "{}") const {
    RunConfig cfg = parse_config(overlay);
    cfg.output_dir = path.string();
    return cfg;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Data rows of a '#'-headed CSV as doubles; non-numeric cells become NaN.
std::vector<std::vector<double>> csv_rows(const fs::path& p) {
  std::vector<std::vector<double>> rows;
  std::ifstream in(p);
  REQUIRE(in);
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> csv_columns(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') break;
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cols.push_back(cell);
  return cols;
}

/// 10-dB reflection band edges by linear interpolation on a sweep CSV.
double ten_db_fbw(const std::vector<std::vector<double>>& rows) {
  double lo = 0.0, hi = 0.0;
  for (size_t i = 1; i < rows.size(); ++i) {
    const double f0 = rows[i - 1][0], f1 = rows[i][0];
    const double s0 = rows[i - 1][1], s1 = rows[i][1];
    if (s0 > -10.0 && s1 <= -10.0 && lo == 0.0)
      lo = f0 + (f1 - f0) * (-10.0 - s0) / (s1 - s0);
    if (s0 <= -10.0 && s1 > -10.0) hi = f0 + (f1 - f0) * (-10.0 - s0) / (s1 - s0);
  }
  REQUIRE(lo > 0.0);
  REQUIRE(hi > lo);
  return (hi - lo) / 2.4e9;
}

}  // namespace

TEST_CASE("synth writes the tuned element record under a config header") {
  OutDir out;
  REQUIRE(cmd_synth(out.config()) == exit_code::ok);

  const std::string text = slurp(out.path / "ladder.txt");
  CHECK(text.rfind("# tmfa synth\n# config: ", 0) == 0);
  CHECK_THAT(text, ContainsSubstring("order = 3"));
  CHECK_THAT(text, ContainsSubstring("reflection_zero_count = 3"));

  // The embedded config line is itself a loadable document.
  std::istringstream in(text);
  std::string banner, config_line;
  std::getline(in, banner);
  std::getline(in, config_line);
  const std::string embedded = config_line.substr(std::string("# config: ").size());
  CHECK(resolved_config(parse_config(embedded)) == embedded);

  double rl = 0.0;
  const auto pos = text.find("achieved_rl_db = ");
  REQUIRE(pos != std::string::npos);
  rl = std::stod(text.substr(pos + std::string("achieved_rl_db = ").size()));
  CHECK(rl >= 13.0);
}

TEST_CASE("synth reports tuner failure without leaving files") {
  OutDir out;
  const RunConfig cfg = out.config(R"({"filter": {"rl_db": 30, "fbw": 0.01, "q_u": 30}})");
  CHECK(run_command("synth", cfg, {}) == exit_code::tuner);
  CHECK_FALSE(fs::exists(out.path / "ladder.txt"));
}

TEST_CASE("static sweep reproduces the published reflection bandwidth") {
  OutDir out;
  REQUIRE(cmd_sweep(out.config(), false) == exit_code::ok);
  const auto rows = csv_rows(out.path / "sweep.csv");
  REQUIRE(rows.size() == 201);
  const double fbw = ten_db_fbw(rows);
  CHECK(fbw >= 0.036);
  CHECK(fbw <= 0.048);
  for (const auto& r : rows) CHECK_THAT(r[2] - r[3], WithinAbs(0.0, 1e-10));
}

TEST_CASE("modulated sweep narrows the reflection band and breaks reciprocity") {
  OutDir out;
  REQUIRE(cmd_sweep(out.config(), false) == exit_code::ok);
  const double static_fbw = ten_db_fbw(csv_rows(out.path / "sweep.csv"));
  REQUIRE(cmd_sweep(out.config(), true) == exit_code::ok);
  const auto rows = csv_rows(out.path / "sweep.csv");
  CHECK(ten_db_fbw(rows) < static_fbw);

  double best_iso = 0.0;
  for (const auto& r : rows) best_iso = std::max(best_iso, r[4]);
  CHECK(best_iso >= 3.0);
}

TEST_CASE("per-harmonic columns appear on request and match the carrier") {
  OutDir out;
  RunConfig cfg = out.config(R"({"sweep": {"harmonics": true, "points": 5}})");
  REQUIRE(cmd_sweep(cfg, true) == exit_code::ok);
  const auto cols = csv_columns(out.path / "sweep.csv");
  REQUIRE(cols.size() == 5 + 2 * 11);
  CHECK(cols[5] == "h-5_fwd_db");
  CHECK(cols.back() == "h+5_rev_db");

  const auto rows = csv_rows(out.path / "sweep.csv");
  const size_t carrier_fwd = 5 + 2 * 5;  // k = 0 forward column
  for (const auto& r : rows) CHECK_THAT(r[carrier_fwd], WithinAbs(r[2], 1e-9));

  // Static sweeps have no sideband columns regardless of the flag.
  REQUIRE(cmd_sweep(cfg, false) == exit_code::ok);
  CHECK(csv_columns(out.path / "sweep.csv").size() == 5);
}

TEST_CASE("one-point grids produce one row") {
  OutDir out;
  const RunConfig cfg =
      out.config(R"({"sweep": {"points": 1, "f_start_hz": "2.4G", "f_stop_hz": "2.4G"}})");
  REQUIRE(cmd_sweep(cfg, false) == exit_code::ok);
  CHECK(csv_rows(out.path / "sweep.csv").size() == 1);
}

TEST_CASE("a sideband collapsing onto DC is a solver failure") {
  OutDir out;
  const RunConfig cfg = out.config(
      R"({"sweep": {"points": 1, "f_start_hz": "375M", "f_stop_hz": "375M"}})");
  CHECK(run_command("sweep", cfg, true) == exit_code::solver);
  CHECK_FALSE(fs::exists(out.path / "sweep.csv"));
}

TEST_CASE("pattern emits the sphere, the cuts, and the impedance table") {
  OutDir out;
  RunConfig cfg = out.config();
  cfg.svg = true;
  REQUIRE(cmd_pattern(cfg, {}) == exit_code::ok);

  CHECK(csv_rows(out.path / "pattern.csv").size() == 180 * 360);
  CHECK(csv_rows(out.path / "impedance.csv").size() == 221);
  const auto e_cut = csv_rows(out.path / "cuts_e_plane.csv");
  const auto h_cut = csv_rows(out.path / "cuts_h_plane.csv");
  CHECK(e_cut.size() == 360);
  CHECK(h_cut.size() == 360);
  CHECK(e_cut.front()[0] == 0.0);
  CHECK(e_cut.back()[0] == 359.0);
  CHECK_THAT(slurp(out.path / "cuts_e_plane.svg"), ContainsSubstring("</svg>"));

  for (const auto& r : csv_rows(out.path / "impedance.csv")) CHECK(r[1] > 0.0);
}

TEST_CASE("boresight rows keep the isolation identity and the zero anchor") {
  OutDir out;
  const RunConfig cfg =
      out.config(R"({"sweep": {"f_start_hz": "2.35G", "f_stop_hz": "2.45G", "points": 11}})");
  REQUIRE(cmd_boresight(cfg, {}) == exit_code::ok);

  const auto rows = csv_rows(out.path / "boresight.csv");
  REQUIRE(rows.size() == 11);
  for (const auto& r : rows) {
    CHECK_THAT(r[5], WithinAbs(r[3] - r[4], 1e-9));
    CHECK(r[2] < r[1]);
  }
  const auto& mid = rows[5];
  CHECK(mid[0] == 2.4e9);
  CHECK_THAT(mid[1], WithinAbs(0.0, 1e-12));
}

TEST_CASE("optimize writes a report, a trace, and a loadable fragment") {
  OutDir out;
  REQUIRE(cmd_optimize(out.config()) == exit_code::ok);

  const std::string report = slurp(out.path / "optimize_report.txt");
  CHECK_THAT(report, ContainsSubstring("converged = true"));
  const auto iso_pos = report.find("isolation_db = ");
  REQUIRE(iso_pos != std::string::npos);
  CHECK(std::stod(report.substr(iso_pos + 15)) >= 20.0);

  const auto trace = csv_rows(out.path / "optimize_trace.csv");
  REQUIRE(trace.size() >= 2);
  for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i][4] <= trace[i - 1][4]);

  const RunConfig follow = parse_config(slurp(out.path / "modulation_opt.json"));
  CHECK(follow.fm_hz > 10e6);
  CHECK(follow.delta_m > 0.01);
}

TEST_CASE("optimize fails loudly when the bounds forbid isolation") {
  OutDir out;
  const RunConfig cfg = out.config(
      R"({"optimizer": {"delta_m_lo": 0, "delta_m_hi": 0, "max_iterations": 40}})");
  CHECK(run_command("optimize", cfg, {}) == exit_code::optimize_floor);
  CHECK_FALSE(fs::exists(out.path / "optimize_report.txt"));
}

TEST_CASE("oracle check passes at a static commensurate point") {
  OutDir out;
  const RunConfig cfg = out.config(R"({
    "oracle": { "points": [ { "f_hz": "2.4G", "fm_hz": "75M" } ],
                "settle_periods": 40, "window_periods": 4 }
  })");
  REQUIRE(run_command("oracle-check", cfg, false) == exit_code::ok);
  const auto rows = csv_rows(out.path / "oracle_check.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][1] == 32.0);
  CHECK_THAT(rows[0][6], WithinAbs(0.0, 0.01));
  CHECK_THAT(rows[0][7], WithinAbs(0.0, 0.01));
}

TEST_CASE("oracle breach still writes the complete comparison table") {
  OutDir out;
  const RunConfig cfg = out.config(R"({
    "oracle": { "points": [ { "f_hz": "2.4G", "fm_hz": "75M" } ],
                "settle_periods": 40, "window_periods": 4, "tolerance_db": 1e-12 }
  })");
  CHECK(run_command("oracle-check", cfg, false) == exit_code::oracle_breach);
  CHECK(csv_rows(out.path / "oracle_check.csv").size() == 1);
}

TEST_CASE("invocation errors map to the validation exit code") {
  OutDir out;
  RunConfig off = out.config(R"({"modulation": {"delta_m": 0}})");
  CHECK(run_command("sweep", off, true) == exit_code::validation);
  CHECK(run_command("frobnicate", out.config(), {}) == exit_code::validation);
}
