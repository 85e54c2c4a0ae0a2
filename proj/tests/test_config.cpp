#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "tmfa/config.hpp"
#include "tmfa/io.hpp"
#include "tmfa/svg.hpp"

using namespace tmfa;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("empty document resolves to the built-in defaults") {
  const RunConfig cfg = parse_config("{}");
  CHECK(cfg.filter.f0_hz == 2.4e9);
  CHECK(cfg.filter.fbw == 0.04);
  CHECK(cfg.filter_q_u == 200.0);
  CHECK(cfg.system.fbw == 0.031);
  CHECK(cfg.system.q_u == 140.0);
  CHECK(cfg.fm_hz == 75e6);
  CHECK(cfg.delta_m == 0.09);
  CHECK(cfg.delta_phi_deg == 56.0);
  CHECK(cfg.antenna.elements.size() == 4);
  CHECK(cfg.sweep.points == 201);
  CHECK(cfg.solver.k_max == 5);
  CHECK(resolved_config(cfg) == resolved_config(RunConfig{}));
}

TEST_CASE("partial documents overlay only the keys they carry") {
  const RunConfig cfg = parse_config(R"({
    "filter": { "fbw": 0.05 },
    "modulation": { "delta_m": 0.12 },
    "sweep": { "points": 41 }
  })");
  CHECK(cfg.filter.fbw == 0.05);
  CHECK(cfg.filter.f0_hz == 2.4e9);
  CHECK(cfg.delta_m == 0.12);
  CHECK(cfg.fm_hz == 75e6);
  CHECK(cfg.sweep.points == 41);
  CHECK(cfg.sweep.f_start_hz == 2.28e9);
}

TEST_CASE("frequencies accept SI suffixes everywhere") {
  const RunConfig cfg = parse_config(R"({
    "filter": { "f0_hz": "2.4G" },
    "modulation": { "fm_hz": "75M" },
    "sweep": { "f_start_hz": "2280M", "f_stop_hz": 2.52e9 },
    "optimizer": { "fm_lo_hz": "10000k" },
    "oracle": { "points": [ { "f_hz": "2.4G", "fm_hz": "75M" } ] }
  })");
  CHECK(cfg.filter.f0_hz == 2.4e9);
  CHECK(cfg.fm_hz == 75e6);
  CHECK(cfg.sweep.f_start_hz == 2.28e9);
  CHECK(cfg.optimizer.bounds.fm_lo_hz == 10e6);
  CHECK(cfg.oracle.points.at(0).first == 2.4e9);

  CHECK_THROWS_AS(parse_config(R"({"filter": {"f0_hz": "2.4Q"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"filter": {"f0_hz": "zap"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"filter": {"f0_hz": true}})"), ConfigError);
}

TEST_CASE("angles are degrees at the interface") {
  const RunConfig cfg = parse_config(R"({
    "modulation": { "delta_phi_deg": 90 },
    "optimizer": { "delta_phi_lo_deg": 10, "delta_phi_hi_deg": 170 }
  })");
  CHECK_THAT(cfg.modulation_spec().phase_rad.at(1), WithinRel(pi / 2, 1e-12));
  CHECK_THAT(cfg.optimizer.bounds.dphi_lo_rad, WithinRel(pi / 18, 1e-12));
  CHECK_THAT(cfg.optimizer.bounds.dphi_hi_rad, WithinRel(17 * pi / 18, 1e-12));
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_MATCHES(parse_config(R"({"filterr": {}})"), ConfigError,
                       Catch::Matchers::MessageMatches(ContainsSubstring("filterr")));
  CHECK_THROWS_AS(parse_config(R"({"filter": {"fbww": 0.04}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sweep": {"n_points": 7}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"antenna": {"elements": [{"length_m": 0.03}]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"oracle": {"points": [{"f": 1}]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"optimizer": {"seeds": 3}})"), ConfigError);
}

TEST_CASE("malformed or invalid documents are rejected before any work") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"([1, 2, 3])"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"filter": {"order": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"filter": {"q_u": -5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"modulation": {"delta_m": 1.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sweep": {"points": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"sweep": {"f_start_hz": 2.4e9, "f_stop_hz": 2.3e9}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"solver": {"k_max": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"system": {"table_lo_hz": "2.39G", "table_hi_hz": "2.41G"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"oracle": {"points": [{"f_hz": "2.41G", "fm_hz": "75M"}]}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"output_dir": ""})"), ConfigError);
}

TEST_CASE("one-point sweeps are allowed and multi-point spans must be real") {
  const RunConfig cfg =
      parse_config(R"({"sweep": {"points": 1, "f_start_hz": "2.4G", "f_stop_hz": "2.4G"}})");
  CHECK(cfg.sweep_grid() == std::vector<double>{2.4e9});
  CHECK_THROWS_AS(parse_config(R"({"sweep": {"points": 2, "f_start_hz": 1e9, "f_stop_hz": 1e9}})"),
                  ConfigError);
}

TEST_CASE("resolved config is itself a loadable document and a fixed point") {
  RunConfig cfg = parse_config(R"({
    "modulation": { "fm_hz": "80M", "delta_m": 0.07, "delta_phi_deg": 72.5 },
    "optimizer": { "seed": 11, "grid": [4, 4, 6] },
    "svg": true
  })");
  const std::string once = resolved_config(cfg);
  const std::string twice = resolved_config(parse_config(once));
  CHECK(once == twice);
}

TEST_CASE("comments are allowed in config documents") {
  const RunConfig cfg = parse_config("// banner\n{ /* inline */ \"svg\": true }");
  CHECK(cfg.svg);
}

TEST_CASE("shipped default config equals the built-in defaults") {
  const auto path =
      std::filesystem::path(__FILE__).parent_path().parent_path() / "configs" / "default.json";
  const RunConfig cfg = load_config(path.string());
  CHECK(resolved_config(cfg) == resolved_config(RunConfig{}));
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("derived option structs carry the config through") {
  const RunConfig cfg = parse_config(R"({
    "filter": { "rl_db": 15 },
    "system": { "q_u": 150, "fbw": 0.033, "table_points": 51 },
    "solver": { "k_max": 4 },
    "optimizer": { "iso_cap_db": 18, "seed": 7 },
    "oracle": { "settle_periods": 120 }
  })");
  const SystemOptions sys = cfg.system_options();
  CHECK(sys.filter.rl_db == 15.0);
  CHECK(sys.filter.fbw == 0.033);
  CHECK(sys.q_u == 150.0);
  CHECK(sys.table_points == 51);
  CHECK(sys.k_max == 4);
  const ModOptOptions mo = cfg.optimizer_options();
  CHECK(mo.iso_cap_db == 18.0);
  CHECK(mo.seed == 7);
  CHECK(mo.k_max == 4);
  const TdOptions td = cfg.oracle_options();
  CHECK(td.settle_periods == 120);
  CHECK(td.k_max == 4);
  CHECK(cfg.oracle_points().size() == 5);
}

TEST_CASE("atomic writes land complete files and clean up after failure") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "tmfa_io_test";
  fs::remove_all(dir);

  write_atomic(dir / "a" / "b.csv", "# x\n1,2\n");
  std::ifstream in(dir / "a" / "b.csv");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == "# x\n1,2\n");
  CHECK_FALSE(fs::exists(dir / "a" / "b.csv.tmp"));

  write_atomic(dir / "a" / "b.csv", "replaced\n");
  std::ifstream in2(dir / "a" / "b.csv");
  std::string text2((std::istreambuf_iterator<char>(in2)), std::istreambuf_iterator<char>());
  CHECK(text2 == "replaced\n");
  fs::remove_all(dir);
}

TEST_CASE("csv documents are rectangular with the header on top") {
  const std::string doc = csv_document("# h\n", {"a", "b"}, {{"1", "2"}, {"3", "4"}});
  CHECK(doc == "# h\na,b\n1,2\n3,4\n");
  CHECK_THROWS_AS(csv_document("# h\n", {"a", "b"}, {{"1"}}), IoError);
}

TEST_CASE("number formatting is compact and round-trips") {
  CHECK(fmt_num(2.4e9) == "2400000000");
  CHECK(fmt_num(0.09) == "0.09");
  CHECK(std::stod(fmt_num(1.0 / 3.0)) == Catch::Approx(1.0 / 3.0).epsilon(1e-11));
}

TEST_CASE("svg plots are self-contained documents") {
  SvgSeries s{"iso_db", "#1f6feb", {2.3e9, 2.4e9, 2.5e9}, {1.0, 20.0, 2.0}};
  const std::string chart = svg_chart("t", "f_hz", "dB", {s});
  CHECK_THAT(chart, ContainsSubstring("<svg"));
  CHECK_THAT(chart, ContainsSubstring("polyline"));
  CHECK_THAT(chart, ContainsSubstring("</svg>"));
  SvgSeries cut{"tx_db", "#d1242f", {0.0, 90.0, 180.0, 270.0}, {0.0, -3.0, -12.0, -3.0}};
  const std::string polar = svg_polar("cut", {cut});
  CHECK_THAT(polar, ContainsSubstring("circle"));
  CHECK_THAT(polar, ContainsSubstring("polyline"));
}
