#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bergman/cli.hpp"

using namespace bergman;
namespace fs = std::filesystem;

namespace {

json weight_p0(int n = 1) { return {{"family", "power"}, {"alpha", 0}, {"normalized", false}, {"n", n}}; }

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("bergman_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int shell(const std::string& cmd) {
  const int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

int run_quiet(const std::string& command, const json& cfg, const fs::path& dir) {
  std::ostringstream log;
  return run(command, cfg, dir.string(), log);
}

}  // namespace

TEST_CASE("report formatting: 17 significant digits, sorted keys, non-finite strings") {
  json j = {{"b", 0.1}, {"a", 1.0 / 3.0}, {"c", number(NAN)}, {"d", number(-INFINITY)}, {"e", 3}};
  const std::string s = dump_report(j);
  CHECK(s.find("\"b\": 0.10000000000000001") != std::string::npos);
  CHECK(s.find("\"a\": 0.33333333333333331") != std::string::npos);
  CHECK(s.find("\"c\": \"nan\"") != std::string::npos);
  CHECK(s.find("\"d\": \"-inf\"") != std::string::npos);
  CHECK(s.find("\"e\": 3") != std::string::npos);
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(json::parse(s)["b"].get<double>() == 0.1);

  const std::string csv = csv_table({"r", "value"}, {{0.5, 2.0}, {0.75, INFINITY}});
  CHECK(csv == "r,value\n0.5,2\n0.75,inf\n");
}

TEST_CASE("weight-info on power(0) reports doubling constant 2") {
  Outputs out;
  run_experiment("weight-info", {{"weight", weight_p0()}}, out);
  CHECK(out.report["doubling_constant_estimate"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(out.report["in_Dhat"] == true);
  CHECK(out.report["version"] == kVersion);
  CHECK(out.report["config_hash"].get<std::string>().size() == 16);
  CHECK(out.tables.count(""));
}

TEST_CASE("norm of z1 for p = 2, n = 1, unweighted is 1/2") {
  Outputs out;
  json cfg = {{"weight", weight_p0()}, {"function", {{"kind", "monomial"}, {"beta", {1}}}}, {"p", 2}, {"seed", 1}};
  run_experiment("norm", cfg, out);
  CHECK(out.report["norm"]["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(out.report["norm"]["method"] == "exact");
  CHECK(out.report["seed"] == 1);
}

TEST_CASE("equivalence-report rows agree with the identity") {
  Outputs out;
  json cfg = {{"weight", weight_p0(2)}, {"p", 2}, {"seed", 9}, {"suite", {{"count", 4}, {"degree", 4}}}};
  run_experiment("equivalence-report", cfg, out);
  REQUIRE(out.report["rows"].size() == 4);
  for (const auto& row : out.report["rows"]) CHECK(row["ratio"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  const std::string& csv = out.tables[""];
  CHECK(csv.rfind("function,lhs,rhs,ratio,stderr,ratio_star,ratio_hat\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("carleson: omega dV gives quotient 1") {
  Outputs out;
  json cfg = {{"weight", weight_p0()}, {"measure", {{"kind", "weighted"}}}, {"p", 2}, {"q", 2}, {"seed", 1},
              {"lattice", {{"K", 6}}}};
  run_experiment("carleson", cfg, out);
  CHECK(std::abs(out.report["sup_estimate"].get<double>() - 1.0) <= 1e-12);
}

TEST_CASE("geometry-check: zero counterexamples") {
  Outputs out;
  run_experiment("geometry-check", {{"n", 2}, {"samples", 2000}, {"seed", 4}}, out);
  CHECK(out.report["ok"] == true);
  CHECK(out.report["checks"].size() == 4);
}

TEST_CASE("schema errors are rejected before any computation") {
  const json norm_ok = {{"weight", weight_p0()}, {"function", {{"kind", "monomial"}, {"beta", {1}}}}, {"seed", 1}};
  auto broken = [&](auto edit) {
    json c = norm_ok;
    edit(c);
    Outputs out;
    CHECK_THROWS_AS(run_experiment("norm", c, out), ConfigError);
    CHECK(out.report.is_null());
  };
  broken([](json& c) { c.erase("seed"); });
  broken([](json& c) { c["seed"] = -3; });
  broken([](json& c) { c["weight"]["family"] = "gaussian"; });
  broken([](json& c) { c["weight"]["alpha"] = -1.5; });
  broken([](json& c) { c["function"]["beta"] = {1, 0}; });
  broken([](json& c) { c["function"] = {{"kind", "kernel_power"}, {"a", {1.0}}, {"s", 2}}; });
  broken([](json& c) { c["colour"] = "blue"; });
  broken([](json& c) { c["p"] = 0; });
  broken([](json& c) { c["formula"] = "lp_identity", c["p"] = 1; });
  broken([](json& c) { c["spec"] = {{"sphere_samples", 10}}; });
  broken([](json& c) { c["command"] = "carleson"; });

  Outputs out;
  CHECK_THROWS_AS(run_experiment("frobnicate", norm_ok, out), ConfigError);
  CHECK_THROWS_AS(run_experiment("geometry-check", {{"n", 2}}, out), ConfigError);

  const fs::path dir = scratch("schema");
  json bad = norm_ok;
  bad.erase("seed");
  CHECK(run_quiet("norm", bad, dir) == kExitSchema);
  CHECK(fs::is_empty(dir));
}

TEST_CASE("accuracy failure gives status 3 and a partial report") {
  const fs::path dir = scratch("accuracy");
  json cfg = {{"weight", {{"family", "power"}, {"alpha", -0.999999}, {"n", 1}}},
              {"function", {{"kind", "kernel_power"}, {"a", {0.999}}, {"s", 3}}},
              {"p", 1.5},
              {"seed", 1},
              {"output", {{"path", "partial"}, {"format", "csv"}}}};
  CHECK(run_quiet("norm", cfg, dir) == kExitAccuracy);
  const json rep = json::parse(slurp(dir / "partial.json"));
  CHECK(rep["status"] == "accuracy_error");
  CHECK(rep.contains("error"));
  CHECK(rep.contains("function"));
  CHECK_FALSE(rep.contains("norm"));
  CHECK_FALSE(fs::exists(dir / "partial.csv"));
}

TEST_CASE("executable: exit statuses and byte-identical reports across thread counts") {
  const std::string exe = BERGMAN_LAB_EXE;
  const std::string cfgdir = BERGMAN_CONFIG_DIR;

  CHECK(shell(exe + " norm --config /nonexistent.json") == kExitSchema);
  CHECK(shell(exe + " --config " + cfgdir + "/norm_z1.json") == kExitSchema);
  CHECK(shell(exe + " carleson --config " + cfgdir + "/norm_z1.json --out " + scratch("wrong").string()) ==
        kExitSchema);
  CHECK(shell(exe + " norm --config " + cfgdir + "/norm_z1.json --threads 0") == kExitSchema);

  const std::string cfg = cfgdir + "/carleson_vanishing.json";
  const fs::path d1 = scratch("t1"), d4 = scratch("t4"), denv = scratch("tenv");
  REQUIRE(shell(exe + " carleson --config " + cfg + " --out " + d1.string() + " --threads 1") == 0);
  REQUIRE(shell(exe + " carleson --config " + cfg + " --out " + d4.string() + " --threads 4") == 0);
  REQUIRE(shell("BERGMAN_LAB_THREADS=3 " + exe + " carleson --config " + cfg + " --out " + denv.string()) == 0);
  for (const char* f : {"carleson_vanishing.json", "carleson_vanishing.csv"}) {
    const std::string a = slurp(d1 / f);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(d4 / f));
    CHECK(a == slurp(denv / f));
  }
  const json rep = json::parse(slurp(d1 / "carleson_vanishing.json"));
  CHECK(rep["profile_slope"].get<double>() <= -0.8);

  const fs::path dz = scratch("z1");
  REQUIRE(shell(exe + " norm --config " + cfgdir + "/norm_z1.json --out " + dz.string()) == 0);
  const json z1 = json::parse(slurp(dz / "norm_z1.json"));
  CHECK(z1["norm"]["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
}
