#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "fopt/experiment.hpp"

using namespace fopt;
using nlohmann::json;

namespace {

json reference_config() {
  return json{
      {"process",
       {{"lambda", 1.0},
        {"node_law", {{"type", "geometric"}, {"a", 0.5}}},
        {"weight_law", {{"type", "exponential"}, {"rate", 1.0}}},
        {"observation_law", {{"type", "exponential"}, {"rate", 1.0}}}}},
      {"thresholds", {{"m1", 3}, {"m", 8}, {"v", 10.0}}},
      {"query", {{"target", "prob_mu1_first"}}},
      {"n_paths", 4000},
      {"seed", 42},
  };
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config parsing round trip") {
  ExperimentConfig cfg = parse_config(reference_config());
  CHECK(cfg.process.lambda == 1.0);
  CHECK(cfg.process.thresholds.m1 == 3);
  CHECK(cfg.n_paths == 4000);
  CHECK(cfg.seed == 42);
  CHECK(cfg.convention == IndexConvention::Proof);
  CHECK(cfg.sum_convention == SumConvention::Standard);
}

TEST_CASE("config validation failures carry field paths") {
  SECTION("missing lambda") {
    json j = reference_config();
    j["process"].erase("lambda");
    try {
      parse_config(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("process.lambda") != std::string::npos);
    }
  }
  SECTION("m1 >= m") {
    json j = reference_config();
    j["thresholds"]["m1"] = 8;
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  SECTION("unknown law type") {
    json j = reference_config();
    j["process"]["node_law"]["type"] = "zipf";
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  SECTION("unknown target") {
    json j = reference_config();
    j["query"]["target"] = "nonsense";
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  SECTION("non-monotone sweep grid") {
    json j = reference_config();
    j["sweep"] = {{"axis", "m1"}, {"grid", {3, 2}}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  SECTION("bad convention") {
    json j = reference_config();
    j["convention"] = "both";
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
  SECTION("probability vector not normalized") {
    json j = reference_config();
    j["process"]["node_law"] = {{"type", "finite_discrete"}, {"p", {0.5, 0.6}}};
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  }
}

TEST_CASE("aux targets with m1 = 0 are rejected under the proof convention") {
  json j = reference_config();
  j["thresholds"]["m1"] = 0;
  ExperimentConfig cfg = parse_config(j);  // parses: m1 = 0 is a valid level
  cfg.mode = RunMode::Eval;
  cfg.output = "cli_m1zero_test.csv";
  CHECK_THROWS_AS(run_config(cfg), ConfigError);
  cfg.convention = IndexConvention::Statement;
  cfg.n_paths = 100;
  CHECK_NOTHROW(run_config(cfg));
  std::remove(cfg.output.c_str());
  std::remove((cfg.output + ".meta").c_str());
}

TEST_CASE("forcing a mismatched backend is a config error") {
  json j = reference_config();
  j["backend"] = "model1";  // process is geometric/exponential
  ExperimentConfig cfg = parse_config(j);
  cfg.mode = RunMode::Eval;
  cfg.output = "cli_backend_test.csv";
  CHECK_THROWS_AS(run_config(cfg), ConfigError);
  std::remove(cfg.output.c_str());
}

TEST_CASE("eval mode emits the closed-form value") {
  ExperimentConfig cfg = parse_config(reference_config());
  cfg.mode = RunMode::Eval;
  cfg.output = "cli_eval_test.csv";
  REQUIRE(run_config(cfg) == kOk);
  std::string body = slurp(cfg.output);
  CHECK(body.find("# backend: model2") != std::string::npos);
  CHECK(body.find("0.7385814") != std::string::npos);
  std::remove(cfg.output.c_str());
  std::remove((cfg.output + ".meta").c_str());
}

TEST_CASE("compare mode passes on the reference set and fails under an absurd tolerance") {
  ExperimentConfig cfg = parse_config(reference_config());
  cfg.mode = RunMode::Compare;
  cfg.output = "cli_cmp_test.csv";
  REQUIRE(run_config(cfg) == kOk);
  std::string body = slurp(cfg.output);
  CHECK(body.find("# verdict: pass") != std::string::npos);

  cfg.tolerance = 1e-4;  // no finite-n Monte Carlo clears this
  CHECK(run_config(cfg) == kCompareFailed);
  CHECK(slurp(cfg.output).find("# verdict: fail") != std::string::npos);
  std::remove(cfg.output.c_str());
  std::remove((cfg.output + ".meta").c_str());
}

TEST_CASE("compare over an m1 sweep") {
  ExperimentConfig cfg = parse_config(reference_config());
  cfg.mode = RunMode::Compare;
  cfg.sweep_axis = SweepAxis::M1;
  cfg.sweep_grid = {1, 2, 3, 4, 5, 6};
  cfg.n_paths = 4000;
  cfg.output = "cli_sweep_cmp_test.csv";
  REQUIRE(run_config(cfg) == kOk);
  std::string body = slurp(cfg.output);
  int rows = 0;
  std::istringstream is(body);
  std::string line;
  while (std::getline(is, line))
    if (line.rfind("m1,", 0) == 0) ++rows;
  CHECK(rows == 6);
  std::remove(cfg.output.c_str());
  std::remove((cfg.output + ".meta").c_str());
}

TEST_CASE("identical configs byte-reproduce regardless of worker count") {
  ExperimentConfig cfg = parse_config(reference_config());
  cfg.mode = RunMode::Compare;
  cfg.threads = 1;
  cfg.output = "cli_det_a.csv";
  REQUIRE(run_config(cfg) == kOk);
  cfg.threads = 4;
  cfg.output = "cli_det_b.csv";
  REQUIRE(run_config(cfg) == kOk);
  CHECK(slurp("cli_det_a.csv") == slurp("cli_det_b.csv"));
  for (const char* f : {"cli_det_a.csv", "cli_det_a.csv.meta", "cli_det_b.csv",
                        "cli_det_b.csv.meta"})
    std::remove(f);
}

TEST_CASE("simulate mode reports the class partition") {
  ExperimentConfig cfg = parse_config(reference_config());
  cfg.mode = RunMode::Simulate;
  cfg.n_paths = 3000;
  cfg.output = "cli_sim_test.csv";
  REQUIRE(run_config(cfg) == kOk);
  std::string body = slurp(cfg.output);
  CHECK(body.find("p_mu_lt_nu") != std::string::npos);
  CHECK(body.find("mean_tau_rho") != std::string::npos);
  std::remove(cfg.output.c_str());
  std::remove((cfg.output + ".meta").c_str());
}

TEST_CASE("sweep mode attaches the analytic column when a backend applies") {
  ExperimentConfig cfg = parse_config(reference_config());
  cfg.mode = RunMode::Sweep;
  cfg.sweep_axis = SweepAxis::V;
  cfg.sweep_grid = {5.0, 10.0, 20.0};
  cfg.n_paths = 2000;
  cfg.output = "cli_sweep_test.csv";
  REQUIRE(run_config(cfg) == kOk);
  std::string body = slurp(cfg.output);
  int rows = 0;
  std::istringstream is(body);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("v,", 0) == 0) {
      ++rows;
      int commas = 0;
      for (char ch : line) commas += (ch == ',');
      CHECK(commas == 4);  // axis, value, empirical, std_error, analytic
    }
  }
  CHECK(rows == 3);
  std::remove(cfg.output.c_str());
  std::remove((cfg.output + ".meta").c_str());
}

TEST_CASE("statement convention comparisons also pass") {
  ExperimentConfig cfg = parse_config(reference_config());
  cfg.mode = RunMode::Compare;
  cfg.convention = IndexConvention::Statement;
  cfg.n_paths = 20000;
  cfg.output = "cli_stmt_test.csv";
  REQUIRE(run_config(cfg) == kOk);
  CHECK(slurp(cfg.output).find("# verdict: pass") != std::string::npos);
  std::remove(cfg.output.c_str());
  std::remove((cfg.output + ".meta").c_str());
}

TEST_CASE("interval target is comparable end to end") {
  json j = reference_config();
  j["query"] = {{"target", "interval"}, {"args", {{"h", 0.5}}}};
  ExperimentConfig cfg = parse_config(j);
  cfg.mode = RunMode::Compare;
  cfg.n_paths = 20000;
  cfg.output = "cli_interval_test.csv";
  REQUIRE(run_config(cfg) == kOk);
  CHECK(slurp(cfg.output).find("# verdict: pass") != std::string::npos);
  std::remove(cfg.output.c_str());
  std::remove((cfg.output + ".meta").c_str());
}
