#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bslq/jsonio.hpp"
#include "helpers.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(CLI_PATH) + " " + args + " 2> cli_stderr.txt";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_example_input() {
  REQUIRE(run("example --output cli_example.json") == 0);
}

}  // namespace

TEST_CASE("example command writes a valid, byte-stable problem file") {
  REQUIRE(run("example --output cli_example_a.json") == 0);
  REQUIRE(run("example --output cli_example_b.json") == 0);
  std::string a = slurp("cli_example_a.json");
  CHECK(a == slurp("cli_example_b.json"));
  bslq::ProblemSpec s = bslq::load_spec(a);
  CHECK(s.horizon == 4);
  CHECK(bslq::validate_spec(s).ok());
}

TEST_CASE("solve writes a report with both value formulas and the exact cost") {
  write_example_input();
  REQUIRE(run("solve --input cli_example.json --output cli_report.json") == 0);
  bslq::Json j = bslq::Json::parse(slurp("cli_report.json"));
  CHECK(j["tool"] == "bslq");
  CHECK(j["value"].get<double>() ==
        doctest::Approx(testutil::frozen::optimal_cost).epsilon(1e-12));
  CHECK(j["oracle_cost"].get<double>() ==
        doctest::Approx(testutil::frozen::optimal_cost).epsilon(1e-12));
  CHECK(j["value_theorem"].get<double>() ==
        doctest::Approx(testutil::frozen::value_theorem_formula).epsilon(1e-10));
  CHECK(j["value_derivation"].get<double>() ==
        doctest::Approx(testutil::frozen::value_derivation_formula).epsilon(1e-10));
  CHECK(j["value_variant"] == "derivation");
  CHECK(j["notes"].size() >= 1);  // the value-formula discrepancy is documented
  CHECK(j["H"].size() == 5);
  CHECK(j["Sigma"].size() == 5);
  CHECK(j["K"].size() == 4);
  CHECK(j["phi"].size() == 5);
  CHECK(j["seed"].get<std::uint64_t>() == 0);
}

TEST_CASE("solve rejects invalid input with exit code 2") {
  {
    std::ofstream out("cli_bad.json");
    out << "{\"horizon\": 0}";
  }
  CHECK(run("solve --input cli_bad.json --output cli_bad_report.json") == 2);
  CHECK(run("solve --input cli_missing_file.json") == 2);
  // validation failure (R = 0) also maps to exit 2
  bslq::ProblemSpec s = testutil::example_spec();
  s.R[0].setZero();
  {
    std::ofstream out("cli_invalid.json");
    out << bslq::save_spec(s);
  }
  CHECK(run("solve --input cli_invalid.json") == 2);
  std::string err = slurp("cli_stderr.txt");
  CHECK(err.find("R_0 not uniformly positive") != std::string::npos);
}

TEST_CASE("verify passes on the example and fails when tampered") {
  write_example_input();
  CHECK(run("verify --input cli_example.json --qp --output cli_verify.json") == 0);
  bslq::Json j = bslq::Json::parse(slurp("cli_verify.json"));
  CHECK(j["pass"] == true);
  CHECK(j["qp_ran"] == true);
  CHECK(j["matched_variant"] == "closed_form");
  CHECK(run("verify --input cli_example.json --tamper b --output cli_tamper.json") == 1);
  bslq::Json t = bslq::Json::parse(slurp("cli_tamper.json"));
  CHECK(t["pass"] == false);
  CHECK(t["checks"]["stationarity"] == false);
}

TEST_CASE("reports are byte-identical across runs with the same input and seed") {
  write_example_input();
  REQUIRE(run("solve --input cli_example.json --seed 5 --output cli_det_a.json") == 0);
  REQUIRE(run("solve --input cli_example.json --seed 5 --output cli_det_b.json") == 0);
  CHECK(slurp("cli_det_a.json") == slurp("cli_det_b.json"));
  REQUIRE(run("verify --input cli_example.json --seed 5 --output cli_det_c.json") == 0);
  REQUIRE(run("verify --input cli_example.json --seed 5 --output cli_det_d.json") == 0);
  CHECK(slurp("cli_det_c.json") == slurp("cli_det_d.json"));
}

TEST_CASE("trajectory dump matches the in-memory solution") {
  write_example_input();
  REQUIRE(run("solve --input cli_example.json --output cli_r.json "
              "--dump-trajectories cli_traj.csv") == 0);
  std::string csv = slurp("cli_traj.csv");
  CHECK(csv.rfind("name,time,path,component,value\n", 0) == 0);
  // spot-check the first optimal control component against the pinned value
  auto pos = csv.find("u,0,,0,");
  REQUIRE(pos != std::string::npos);
  double dumped = std::strtod(csv.c_str() + pos + 7, nullptr);
  CHECK(dumped == doctest::Approx(testutil::frozen::u0()(0)).epsilon(1e-12));
  CHECK(csv.find("y,4,0000,") != std::string::npos);
}

TEST_CASE("oracle command solves by quadratic programming alone") {
  write_example_input();
  REQUIRE(run("oracle --input cli_example.json --output cli_oracle.json") == 0);
  bslq::Json j = bslq::Json::parse(slurp("cli_oracle.json"));
  CHECK(j["optimal_cost"].get<double>() ==
        doctest::Approx(testutil::frozen::optimal_cost).epsilon(1e-10));
  CHECK(j["stationarity_residual"].get<double>() < 1e-9);
  CHECK(j["stacked_control_dim"].get<int>() == 30);
}

TEST_CASE("schema command describes the input format") {
  REQUIRE(run("schema --output cli_schema.json") == 0);
  bslq::Json j = bslq::Json::parse(slurp("cli_schema.json"));
  CHECK(j["fields"].contains("horizon"));
  CHECK(j["fields"].contains("xi"));
}

TEST_CASE("tolerance overrides are applied") {
  // sym_rel loosened enough to accept an asymmetric Q
  bslq::ProblemSpec s = testutil::example_spec();
  s.Q[0](0, 1) = 1e-6;
  {
    std::ofstream out("cli_asym.json");
    out << bslq::save_spec(s);
  }
  CHECK(run("solve --input cli_asym.json --output /dev/null") == 2);
  CHECK(run("solve --input cli_asym.json --tol sym_rel=1e-3 --output /dev/null") == 0);
  CHECK(run("solve --input cli_asym.json --tol nonsense=1 --output /dev/null") == 2);
}
