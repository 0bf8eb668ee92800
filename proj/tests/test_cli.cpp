#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "morphoscope/catalog.hpp"
#include "morphoscope/cli.hpp"

using namespace morpho;

namespace {

RunResult quiet_run(RunOptions o) {
  o.write_files = false;
  std::ostringstream out, err;
  return run(o, out, err);
}

RunOptions options(const std::string& command, const std::string& config) {
  RunOptions o;
  o.command = command;
  o.config = config;
  return o;
}

std::string write_temp(const std::string& name, const json& j) {
  const auto path = std::filesystem::temp_directory_path() / ("morphoscope_test_" + name + ".json");
  std::ofstream(path) << j.dump(2);
  return path.string();
}

}  // namespace

TEST(Config, CatalogRoundTripsThroughFiles) {
  for (const auto& e : catalog_entries()) {
    const ScenarioConfig a = parse_config(catalog_config(e.name));
    const std::string path = write_temp(e.name, a.canonical);
    const ScenarioConfig b = load_config(path);
    EXPECT_EQ(fingerprint(a.canonical), fingerprint(b.canonical)) << e.name;
    EXPECT_EQ(a.canonical.dump(), b.canonical.dump()) << e.name;
  }
}

TEST(Config, DefaultsAreFilledIn) {
  const ScenarioConfig c = parse_config(catalog_config("z1z2"));
  const json& a = c.canonical["analysis"];
  EXPECT_EQ(a["radii"].size(), 8u);
  EXPECT_DOUBLE_EQ(a["radii"][0].get<double>(), 0.1);
  EXPECT_DOUBLE_EQ(a["radii"][7].get<double>(), 0.1 / 128);
  EXPECT_EQ(c.canonical["derivatives"], "exact");
  EXPECT_EQ(c.canonical["target_metric"]["kind"], "flat");
}

TEST(Config, ErrorsNameTheField) {
  auto expect_error = [](json j, const std::string& field) {
    try {
      parse_config(j);
      ADD_FAILURE() << "accepted config with bad " << field;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  const json base = catalog_config("z1z2");
  json j = base;
  j["analysis"]["radii"] = {0.1, -0.05};
  expect_error(j, "analysis.radii[1]");
  j = base;
  j["analysis"]["radii"] = {0.1, 0.2};
  expect_error(j, "analysis.radii[1]");
  j = base;
  j["map"]["coefficients"][0]["i"] = -1;
  expect_error(j, "map.coefficients[0]");
  j = base;
  j["map"]["coefficients"][0]["i"] = 6;
  expect_error(j, "map.coefficients[0]");
  j = base;
  j["domain"][2] = {1.0, 1.0};
  expect_error(j, "domain[2]");
  j = base;
  j.erase("map");
  expect_error(j, "map");
  j = base;
  j["map"]["coefficients"][0].erase("re");
  expect_error(j, "map.coefficients[0].re");
  j = base;
  j["metric"] = {{"kind", "hyperbolic"}};
  expect_error(j, "metric.kind");
  j = catalog_config("control_scaled");
  j["map"]["components"][0][0]["exponents"] = {7, 0, 0, 0};
  expect_error(j, "map.components[0][0].exponents");
}

TEST(Config, FingerprintIsStable) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Cli, ValidateCatalogEntry) {
  const RunResult r = quiet_run(options("validate", "catalog:z1z2"));
  EXPECT_EQ(r.exit_code, 0);
  for (const auto& v : r.report["verdicts"]) EXPECT_EQ(v["status"], "PASS");
  EXPECT_LE(r.report["verdicts"][1]["evidence"]["max_tension_norm"].get<double>(), 1e-8);
  EXPECT_EQ(r.report["records"].size(), 100u);
}

TEST(Cli, AnalyzeExample) {
  RunOptions o = options("analyze", "catalog:z1z2");
  o.point = parse_point("1,0,0,0");
  const RunResult r = quiet_run(o);
  ASSERT_EQ(r.exit_code, 0);
  const json& rec = r.report["records"][0];
  EXPECT_EQ(rec["classification"], "regular");
  EXPECT_DOUBLE_EQ(rec["lambda"].get<double>(), 1.0);
  const json expected = json::array({{0.0, -1.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, -1.0}, {0.0, 0.0, 1.0, 0.0}});
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(rec["J_plus"][i][j].get<double>(), expected[i][j].get<double>(), 1e-14);
  }
}

TEST(Cli, FailingVerdictGivesExitOne) {
  const RunResult r = quiet_run(options("validate", "catalog:control_scaled"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NEAR(r.report["verdicts"][0]["evidence"]["max_hwc_defect"].get<double>(), 2.1213203435596424, 1e-6);
}

TEST(Cli, ConfigErrorsGiveExitTwo) {
  json j = catalog_config("z1z2");
  j["analysis"]["radii"] = {0.1, -0.05};
  const RunResult r = quiet_run(options("rate", write_temp("negative_radius", j)));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.error.find("analysis.radii"), std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "morphoscope_test_malformed.json";
  std::ofstream(path) << "{\"domain\": [1, 2,";
  EXPECT_EQ(quiet_run(options("validate", path.string())).exit_code, 2);
  EXPECT_EQ(quiet_run(options("validate", "catalog:nope")).exit_code, 2);
  EXPECT_EQ(quiet_run(options("frobnicate", "catalog:z1z2")).exit_code, 2);

  RunOptions outside = options("analyze", "catalog:z1z2");
  outside.point = Vec4(5, 0, 0, 0);
  EXPECT_EQ(quiet_run(outside).exit_code, 2);
  EXPECT_THROW(parse_point("1,2,3"), ConfigError);
  EXPECT_THROW(parse_point("1,2,x,4"), ConfigError);
}

TEST(Cli, SymbolFailureIsAVerdict) {
  json j = catalog_config("control_scaled");
  j["map"]["components"] = json::array({json::array({{{"exponents", {1, 0, 1, 0}}, {"coeff", 1.0}},
                                                     {{"exponents", {0, 1, 0, 1}}, {"coeff", 1.0}}}),
                                        json::array({{{"exponents", {1, 0, 0, 1}}, {"coeff", 1.0}},
                                                     {{"exponents", {0, 1, 1, 0}}, {"coeff", 1.0}}})});
  const RunResult r = quiet_run(options("symbol", write_temp("nonholomorphic", j)));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.report["verdicts"][0]["status"], "FAIL");
}

TEST(Cli, ReportsAreDeterministicAcrossWorkers) {
  for (const auto& [cmd, scan] : {std::pair<std::string, bool>{"validate", false}, {"weingarten", true}, {"twistor", false}}) {
    RunOptions a = options(cmd, "catalog:pullback_z1z2");
    a.scan = scan;
    RunOptions b = a;
    b.workers = 4;
    const RunResult ra = quiet_run(a), rb = quiet_run(b);
    EXPECT_EQ(ra.report["fingerprint"], rb.report["fingerprint"]) << cmd;
    EXPECT_EQ(report_fingerprint(ra.report), ra.report["fingerprint"].get<std::string>());
    EXPECT_EQ(ra.csv, rb.csv);
  }
}

TEST(Cli, SeedOverrideChangesSamples) {
  RunOptions a = options("validate", "catalog:proj");
  RunOptions b = a;
  b.seed = 2;
  const RunResult ra = quiet_run(a), rb = quiet_run(b);
  EXPECT_NE(ra.report["scenario"]["fingerprint"], rb.report["scenario"]["fingerprint"]);
  EXPECT_NE(ra.report["records"][0]["point"], rb.report["records"][0]["point"]);
}

TEST(Cli, WritesReportFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "morphoscope_test_out";
  std::filesystem::remove_all(dir);
  RunOptions o = options("weingarten", "catalog:pullback_z1z2");
  o.scan = true;
  o.out_dir = dir.string();
  std::ostringstream out, err;
  const RunResult r = run(o, out, err);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "pullback_z1z2_weingarten_scan.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "pullback_z1z2_weingarten_scan.csv"));
  EXPECT_NE(out.str().find("PASS weingarten pullback_z1z2 product_bounded"), std::string::npos);
  std::ifstream f(dir / "pullback_z1z2_weingarten_scan.csv");
  std::string header;
  std::getline(f, header);
  EXPECT_NE(header.find("point_0,point_1,point_2,point_3,product,"), std::string::npos) << header;
}

TEST(Cli, CatalogCommand) {
  const RunResult r = quiet_run(options("catalog", ""));
  EXPECT_EQ(r.exit_code, 0);
  std::vector<std::string> names;
  for (const auto& e : r.report["entries"]) names.push_back(e["name"]);
  for (const char* n : {"proj", "z1z2", "z1sq", "z1z2_cubic", "pullback_z1z2", "product_sphere"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
}

TEST(Csv, FlattensNestedRecords) {
  const json recs = json::array({{{"a", 1}, {"p", {1.5, 2}}, {"s", "x,y"}}, {{"a", 2}, {"q", {{"r", 3}}}}});
  EXPECT_EQ(records_to_csv(recs), "a,p_0,p_1,s,q.r\n1,1.5,2,\"x,y\",\n2,,,,3\n");
}
