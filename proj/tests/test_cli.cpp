#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* cli_path() { return DPHASE_CLI_PATH; }

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "run.log";
  const std::string cmd =
      std::string("\"") + cli_path() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream is(log);
  std::stringstream ss;
  ss << is.rdbuf();
  res.output = ss.str();
  return res;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dphase_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const json& cfg) {
  const fs::path path = dir / "config.json";
  std::ofstream os(path);
  os << cfg.dump(2);
  return path;
}

json base_config() {
  return {{"p", 2.0},
          {"q", 1.5},
          {"domain", {{"kind", "interval"}, {"length", 1.0}, {"n", 48}}},
          {"weight", {{"kind", "constant"}, {"c", 1e-3}}},
          {"reaction", {{"kind", "f1"}, {"r", 4.0}}}};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("solve-ground happy path") {
  const fs::path dir = fresh_dir("ground");
  const fs::path cfg = write_config(dir, base_config());
  const RunResult res =
      run_cli("solve-ground \"" + cfg.string() + "\" --out \"" + dir.string() + "\"", dir);
  INFO(res.output);
  CHECK(res.exit_code == 0);
  REQUIRE(fs::exists(dir / "report.json"));
  REQUIRE(fs::exists(dir / "solution.csv"));
  const json rep = json::parse(slurp(dir / "report.json"));
  CHECK(rep.at("converged").get<bool>());
  CHECK(rep.at("energy").get<double>() > 0.0);
  CHECK(rep.at("sign_class").get<std::string>() != "nodal");
  CHECK(rep.contains("config"));  // audit trail embedded
  // solution.csv header
  std::ifstream is(dir / "solution.csv");
  std::string header;
  std::getline(is, header);
  CHECK(header == "x,u");
}

TEST_CASE("solve-nodal happy path") {
  const fs::path dir = fresh_dir("nodal");
  const fs::path cfg = write_config(dir, base_config());
  const RunResult res =
      run_cli("solve-nodal \"" + cfg.string() + "\" --out \"" + dir.string() + "\"", dir);
  INFO(res.output);
  CHECK(res.exit_code == 0);
  const json rep = json::parse(slurp(dir / "report.json"));
  CHECK(rep.at("sign_class").get<std::string>() == "nodal");
  CHECK(std::abs(rep.at("defects").at("positive_part").get<double>()) < 1e-6);
}

TEST_CASE("invalid exponents exit with code 2 and cite the requirement") {
  const fs::path dir = fresh_dir("badq");
  json cfg = base_config();
  cfg["q"] = 2.5;  // q >= p
  const fs::path path = write_config(dir, cfg);
  const RunResult res = run_cli("solve-ground \"" + path.string() + "\"", dir);
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("1 < q < p") != std::string::npos);
}

TEST_CASE("unreadable or malformed config exits with code 2") {
  const fs::path dir = fresh_dir("badjson");
  const fs::path path = dir / "config.json";
  std::ofstream(path) << "{ not json";
  const RunResult res = run_cli("solve-ground \"" + path.string() + "\"", dir);
  CHECK(res.exit_code == 2);

  const RunResult missing = run_cli("solve-ground \"" + (dir / "nope.json").string() + "\"", dir);
  CHECK(missing.exit_code == 2);

  json cfg = base_config();
  cfg.erase("p");
  const fs::path nop = write_config(dir, cfg);
  const RunResult nofield = run_cli("solve-ground \"" + nop.string() + "\"", dir);
  CHECK(nofield.exit_code == 2);
  CHECK(nofield.output.find("p") != std::string::npos);  // message names the field
}

TEST_CASE("non-convergence exits with code 3 and flags the report") {
  const fs::path dir = fresh_dir("nonconv");
  const fs::path cfg = write_config(dir, base_config());
  const RunResult res = run_cli("solve-ground \"" + cfg.string() + "\" --out \"" + dir.string() +
                                    "\" --max-iters 1 --tol 1e-15 --restarts 0",
                                dir);
  CHECK(res.exit_code == 3);
  const json rep = json::parse(slurp(dir / "report.json"));
  CHECK_FALSE(rep.at("converged").get<bool>());
  CHECK(rep.contains("message"));
}

TEST_CASE("identical config and seed give byte-identical reports") {
  const fs::path dir1 = fresh_dir("det1");
  const fs::path dir2 = fresh_dir("det2");
  const fs::path cfg = write_config(dir1, base_config());
  const RunResult r1 = run_cli(
      "solve-ground \"" + cfg.string() + "\" --out \"" + dir1.string() + "\" --seed 7", dir1);
  const RunResult r2 = run_cli(
      "solve-ground \"" + cfg.string() + "\" --out \"" + dir2.string() + "\" --seed 7", dir2);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(dir1 / "report.json") == slurp(dir2 / "report.json"));
  CHECK(slurp(dir1 / "solution.csv") == slurp(dir2 / "solution.csv"));
}

TEST_CASE("eigen subcommand") {
  const fs::path dir = fresh_dir("eigen");
  const fs::path cfg = write_config(dir, base_config());
  const RunResult res =
      run_cli("eigen \"" + cfg.string() + "\" --out \"" + dir.string() + "\"", dir);
  INFO(res.output);
  CHECK(res.exit_code == 0);
  const json rep = json::parse(slurp(dir / "eigen.json"));
  CHECK(rep.at("lambda1").get<double>() == Catch::Approx(M_PI * M_PI).epsilon(1e-2));
  CHECK(fs::exists(dir / "u1.csv"));
}

TEST_CASE("fibering and lemma1 subcommands emit curve files") {
  const fs::path dir = fresh_dir("curves");
  json cfg = base_config();
  cfg["p"] = 3.0;
  cfg["q"] = 2.0;
  cfg["weight"] = {{"kind", "power"}, {"c", 1.0}, {"z0", {0.5}}, {"alpha", 1.0}};
  const fs::path path = write_config(dir, cfg);

  const RunResult fib =
      run_cli("fibering \"" + path.string() + "\" --out \"" + dir.string() + "\"", dir);
  INFO(fib.output);
  CHECK(fib.exit_code == 0);
  std::ifstream fcsv(dir / "fibering.csv");
  std::string header;
  std::getline(fcsv, header);
  CHECK(header == "t,mu,dmu");

  const RunResult lem =
      run_cli("lemma1 \"" + path.string() + "\" --out \"" + dir.string() + "\"", dir);
  INFO(lem.output);
  CHECK(lem.exit_code == 0);
  const json rep = json::parse(slurp(dir / "lemma1.json"));
  CHECK(rep.at("fitted_slope").get<double>() == Catch::Approx(-1.0).margin(0.1));
  std::ifstream lcsv(dir / "lemma1.csv");
  std::getline(lcsv, header);
  CHECK(header == "t,theta,gap");
}

TEST_CASE("check-hypotheses reports the Ambrosetti-Rabinowitz witness") {
  const fs::path dir = fresh_dir("hypo");
  json cfg = base_config();
  cfg["reaction"] = {{"kind", "f2"}, {"s", 3.0}};
  const fs::path path = write_config(dir, cfg);
  const RunResult res = run_cli(
      "check-hypotheses \"" + path.string() + "\" --out \"" + dir.string() + "\" --ar-theta 3.0",
      dir);
  INFO(res.output);
  CHECK(res.exit_code == 0);
  const json rep = json::parse(slurp(dir / "hypotheses.json"));
  const json& ar = rep.at("ambrosetti_rabinowitz");
  CHECK_FALSE(ar.at("holds").get<bool>());
  CHECK(std::abs(ar.at("witness_x").get<double>()) > 1.0);
}
