// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "cdde/errors.hpp"
#include "doctest.h"

using namespace cdde;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("cdde_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cdde");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return app::cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::string error_message(const json& j) {
  try {
    app::parse_config(j);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
    return e.what();
  }
  FAIL("config accepted");
  return {};
}

}  // namespace

TEST_CASE("valid positivity config") {
  json j = {{"command", "positivity"}, {"beta", 1.0}, {"m", 2}, {"n_sub", 12}, {"eta", 0.5}, {"seed", 7},
            {"trials", 10}};
  app::ExperimentConfig c = app::parse_config(j);
  CHECK(c.command == "positivity");
  CHECK(c.n_sub == 12);
  CHECK(c.eta == 0.5);
  CHECK(c.seed == 7);
  CHECK(c.seed_given);
  CHECK(c.beta.kind == app::CoefSpec::Kind::Constant);
}

TEST_CASE("config validation names the offending field") {
  CHECK(error_message({{"command", "positivity"}, {"gamma", 1.0}, {"n_sub", 3}, {"eta", 0.4}, {"seed", 1}})
            .find("eta") != std::string::npos);
  CHECK(error_message({{"command", "explode"}}).find("command") != std::string::npos);
  CHECK(error_message({{"command", "floquet"}, {"colour", "red"}}).find("colour") != std::string::npos);
  CHECK(error_message({{"command", "positivity"}, {"beta", 1.0}}).find("seed") != std::string::npos);
  CHECK(error_message({{"command", "floquet"}, {"n_sub", 1}}).find("n_sub") != std::string::npos);
  CHECK(error_message({{"command", "u0check"}, {"m", 5}}).find("m") != std::string::npos);
  CHECK(error_message({{"command", "u0check"}, {"probe", "spike"}}).find("probe") != std::string::npos);
  CHECK(error_message({{"command", "floquet"},
                       {"beta", {{"sinusoid", {{"mean", 1.0}, {"amplitude", 0.5}, {"frequency", 1.5}}}}}})
            .find("beta") != std::string::npos);
  CHECK(error_message({{"command", "spectrum"}}).find("matrix") != std::string::npos);
  CHECK(error_message({{"command", "positivity"}, {"seed", -4}}).find("seed") != std::string::npos);
}

TEST_CASE("load_config reads files") {
  fs::path d = scratch_dir("load");
  fs::create_directories(d);
  std::ofstream(d / "c.json") << R"({"command": "floquet", "beta": {"sinusoid": {"mean": 1, "amplitude": 0.5, "frequency": 1}}})";
  app::ExperimentConfig c = app::load_config((d / "c.json").string());
  CHECK(c.beta.kind == app::CoefSpec::Kind::Sinusoid);
  std::ofstream(d / "bad.json") << "{ not json";
  CHECK_THROWS_AS(app::load_config((d / "bad.json").string()), Error);
  fs::remove_all(d);
}

TEST_CASE("floquet end to end") {
  fs::path d = scratch_dir("floquet");
  CHECK(run_cli({"--out", d.string(), "floquet", "--beta", "1", "--nsub", "32", "--kmax", "4"}) == 0);
  const std::string csv = slurp(d / "multipliers.csv");
  CHECK(csv.rfind("k,re,im,mod,lap,bound\n", 0) == 0);
  json j = read_json(d / "floquet.json");
  CHECK(j["passed"] == true);
  CHECK(j["config_echo"]["command"] == "floquet");
  CHECK(fs::exists(d / "scatter.csv"));
  json run = read_json(d / "run.json");
  for (const auto& f : run["files"]) CHECK(fs::exists(f.get<std::string>()));
  fs::remove_all(d);
}

TEST_CASE("exploratory u0check always exits 0") {
  fs::path d = scratch_dir("u0");
  CHECK(run_cli({"--out", d.string(), "u0check", "--m", "4", "--k", "2", "--nsub", "12"}) == 0);
  json j = read_json(d / "ratio.json");
  CHECK(j["exploratory"] == true);
  CHECK(slurp(d / "ratio.csv").rfind("j1,j2,j3,j4,ratio\n", 0) == 0);
  fs::remove_all(d);
}

TEST_CASE("exit codes") {
  fs::path d = scratch_dir("codes");
  CHECK(run_cli({"--out", d.string(), "--seed", "3", "positivity", "--beta", "-1", "--m", "2", "--nsub", "8"}) == 2);
  CHECK(run_cli({"--out", d.string(), "floquet", "--nsub", "abc"}) == 2);
  CHECK(run_cli({"--out", d.string(), "nonsense"}) == 2);
  CHECK(run_cli({"--out", d.string()}) == 2);
  CHECK(run_cli({"--version"}) == 0);
  fs::create_directories(d);
  {
    std::ofstream m(d / "big.csv");
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 12; ++j) m << (i == j ? 1 : 0) << (j < 11 ? "," : "\n");
    }
  }
  CHECK(run_cli({"--out", d.string(), "spectrum", "--matrix", (d / "big.csv").string(), "--compound", "13"}) == 2);
  fs::remove_all(d);
}

TEST_CASE("spectrum subcommand") {
  fs::path d = scratch_dir("spectrum");
  fs::create_directories(d);
  std::ofstream(d / "a.csv") << "2,0,0\n0,2,0\n0,0,3\n";
  CHECK(run_cli({"--out", d.string(), "spectrum", "--matrix", (d / "a.csv").string(), "--compound", "2"}) == 0);
  const std::string csv = slurp(d / "eigenvalues.csv");
  CHECK(csv.rfind("re,im,mult\n", 0) == 0);
  CHECK(csv.find(",2\n") != std::string::npos);
  CHECK(slurp(d / "scatter.csv").rfind("re,im\n", 0) == 0);
  fs::remove_all(d);
}

TEST_CASE("config file and flags merge") {
  fs::path d = scratch_dir("merge");
  fs::create_directories(d);
  std::ofstream(d / "c.json") << R"({"command": "detcheck", "beta": 1, "m": 2, "n_sub": 8, "window": [0, 1]})";
  CHECK(run_cli({"--config", (d / "c.json").string(), "--out", (d / "o").string()}) == 0);
  json j = read_json(d / "o" / "detcheck.json");
  CHECK(j["config_echo"]["n_sub"] == 8);
  CHECK(run_cli({"--config", (d / "c.json").string(), "--out", (d / "p").string(), "detcheck", "--nsub", "10"}) == 0);
  j = read_json(d / "p" / "detcheck.json");
  CHECK(j["config_echo"]["n_sub"] == 10);
  fs::remove_all(d);
}

TEST_CASE("identical runs give identical outputs") {
  fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  for (const fs::path& d : {a, b}) {
    CHECK(run_cli({"--out", d.string(), "--seed", "11", "--threads", "3", "positivity", "--beta", "sin:1,0.5,1",
                   "--m", "2", "--nsub", "10", "--trials", "8"}) == 0);
    CHECK(run_cli({"--out", (d / "sim").string(), "simulate", "--beta", "1", "--alpha", "0.2", "--nsub", "10",
                   "--horizon", "3"}) == 0);
  }
  for (const char* f : {"positivity.json", "sim/trajectory.csv", "sim/simulate.json"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  json p = read_json(a / "positivity.json");
  CHECK(p["seed"] == 11);
  CHECK(p["config_echo"]["seed"] == 11);
  CHECK(slurp(a / "sim/trajectory.csv").rfind("t,x\n", 0) == 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sample file coefficients") {
  fs::path d = scratch_dir("samples");
  fs::create_directories(d);
  {
    std::ofstream s(d / "beta.csv");
    for (int i = 0; i < 8; ++i) s << 1.0 + 0.1 * i << '\n';
  }
  CHECK(run_cli({"--out", (d / "o").string(), "floquet", "--beta", "file:" + (d / "beta.csv").string(), "--nsub",
                 "8", "--kmax", "2"}) == 0);
  fs::remove_all(d);
}

TEST_CASE("error kinds map to the documented exit statuses") {
  CHECK(exit_code(ErrorKind::InvalidArgument) == 2);
  CHECK(exit_code(ErrorKind::Unsupported) == 2);
  CHECK(exit_code(ErrorKind::NumericFailure) == 3);
  CHECK(exit_code(ErrorKind::Capacity) == 4);
}
