#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oadmm/experiment.hpp"

using namespace oadmm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

constexpr const char* kSpecText = R"(
# desk-scale comparison
dataset = "randn-12-6:seed=5"
r = 3
rho = 2.0
k = 8
budget = 12
seed = 9
deterministic = true

[solver.ep]
kind = "oadmm"
variant = "ep"

[solver.rr]
kind = "oadmm"
variant = "rr"

[solver.sub]
kind = "subgrad"

[solver.spgm]
kind = "spgm_ep"

[solver.radmm]
kind = "fixed_beta_admm"
beta = 25.0
)";

}  // namespace

TEST_CASE("toml subset parser handles tables, scalars, and comments") {
  const std::string text = R"(
title = "exp"   # trailing comment
count = 3
ratio = 0.5
flag = true

[solver.alpha]
kind = "oadmm"
sigma = 1.1
)";
  toml::Document doc = toml::parse(text);
  CHECK(doc.text("", "title") == "exp");
  CHECK(doc.integer("", "count") == 3);
  CHECK(doc.number("", "ratio") == 0.5);
  CHECK(doc.boolean("", "flag"));
  CHECK(doc.text("solver.alpha", "kind") == "oadmm");
  CHECK(doc.number("solver.alpha", "sigma") == 1.1);
  CHECK_FALSE(doc.has("", "missing"));
}

TEST_CASE("toml subset parser rejects what it does not support") {
  CHECK_THROWS_AS(toml::parse("x = [1, 2]"), oadmm::ParseError);
  CHECK_THROWS_AS(toml::parse("x = {a = 1}"), oadmm::ParseError);
  CHECK_THROWS_AS(toml::parse("x = 1\nx = 2"), oadmm::ParseError);
  CHECK_THROWS_AS(toml::parse("[t]\n[t]"), oadmm::ParseError);
  CHECK_THROWS_AS(toml::parse("just a line"), oadmm::ParseError);
  CHECK_THROWS_AS(toml::parse("x = "), oadmm::ParseError);
}

TEST_CASE("experiment specs parse with defaults and solver tables") {
  ExperimentSpec spec = ExperimentSpec::from_toml(toml::parse(kSpecText));
  CHECK(spec.dataset == "randn-12-6:seed=5");
  CHECK(spec.r == 3);
  CHECK(spec.rho_dot == 2.0);
  CHECK(spec.budget == 12);
  CHECK(spec.deterministic);
  REQUIRE(spec.solvers.size() == 5);
  CHECK(spec.solvers[0].name == "ep");
  CHECK(spec.solvers[0].kind == "oadmm");

  CHECK_THROWS_AS(ExperimentSpec::from_toml(toml::parse("budget = 5")),
                  ConfigInvalidError);
}

TEST_CASE("trace csv uses the exact schema with empty optional fields") {
  std::vector<IterationTrace> trace(2);
  trace[0].t = 1;
  trace[0].objective = 2.5;
  trace[0].crit = 0.125;
  trace[1].t = 2;
  trace[1].objective = 2.0;

  fs::path dir = temp_dir("oadmm_trace_csv");
  const fs::path path = dir / "x.trace.csv";
  write_trace_csv(path.string(), trace);
  std::istringstream in(slurp(path));
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,objective,crit,theta,primal_residual,beta,eta,backtracks,elapsed_s");
  std::getline(in, line);
  CHECK(line == "1,2.5,0.125,,,,,,");
  std::getline(in, line);
  CHECK(line == "2,2,,,,,,,");
  fs::remove_all(dir);
}

TEST_CASE("summary echoes configuration and the last trace row") {
  ExperimentSpec spec;
  spec.dataset = "randn-4-3";
  spec.solvers.push_back({"only", "oadmm", {}});
  RunOutput out;
  out.name = "only";
  out.kind = "oadmm";
  IterationTrace row;
  row.t = 7;
  row.objective = 1.25;
  row.crit = 0.5;
  out.trace.push_back(row);
  row.t = 8;
  row.objective = 1.0;
  row.crit = 0.25;
  out.trace.push_back(row);

  const std::string text = emit_summary(spec, {out});
  nlohmann::json doc = nlohmann::json::parse(text);  // strict round trip
  CHECK(doc["solvers"]["only"]["final_objective"] == 1.0);
  CHECK(doc["solvers"]["only"]["best_objective"] == 1.0);
  CHECK(doc["solvers"]["only"]["final_crit"] == 0.25);
  CHECK(doc["solvers"]["only"]["iterations"] == 8);
  CHECK(doc["config"]["dataset"] == "randn-4-3");
  CHECK(doc["library_version"] == kLibraryVersion);
}

TEST_CASE("run_experiment writes per-solver traces and is byte-deterministic") {
  ExperimentSpec spec = ExperimentSpec::from_toml(toml::parse(kSpecText));
  fs::path dir_a = temp_dir("oadmm_exp_a");
  fs::path dir_b = temp_dir("oadmm_exp_b");

  spec.out_dir = dir_a.string();
  REQUIRE(run_experiment(spec) == 0);
  spec.out_dir = dir_b.string();
  REQUIRE(run_experiment(spec) == 0);

  for (const char* name : {"ep", "rr", "sub", "spgm", "radmm"}) {
    const fs::path a = dir_a / (std::string(name) + ".trace.csv");
    const fs::path b = dir_b / (std::string(name) + ".trace.csv");
    REQUIRE(fs::exists(a));
    CHECK(slurp(a) == slurp(b));
  }
  CHECK(slurp(dir_a / "summary.json") == slurp(dir_b / "summary.json"));
  CHECK(fs::exists(dir_a / "plot_objective.csv"));

  nlohmann::json summary = nlohmann::json::parse(slurp(dir_a / "summary.json"));
  CHECK(summary["solvers"].size() == 5);
  for (const auto& [name, entry] : summary["solvers"].items()) {
    CHECK(entry.contains("final_objective"));
  }

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("unknown solver kinds are a config failure naming the offender") {
  ExperimentSpec spec = ExperimentSpec::from_toml(toml::parse(kSpecText));
  spec.solvers[2].kind = "annealing";
  fs::path dir = temp_dir("oadmm_exp_bad");
  spec.out_dir = dir.string();
  CHECK(run_experiment(spec) == 2);
  fs::remove_all(dir);
}

TEST_CASE("a failing solver yields exit 1 but preserves the other results") {
  ExperimentSpec spec = ExperimentSpec::from_toml(toml::parse(R"(
dataset = "randn-10-5:seed=2"
r = 2
rho = 1.0
k = 4
budget = 5
seed = 3
deterministic = true

[solver.good]
kind = "oadmm"
variant = "rr"

[solver.broken]
kind = "fixed_beta_admm"
beta = -5.0
)"));
  fs::path dir = temp_dir("oadmm_exp_partial");
  spec.out_dir = dir.string();
  CHECK(run_experiment(spec) == 1);
  CHECK(fs::exists(dir / "good.trace.csv"));
  CHECK_FALSE(fs::exists(dir / "broken.trace.csv"));
  nlohmann::json summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["solvers"]["broken"].contains("error"));
  CHECK(summary["solvers"]["good"].contains("final_objective"));
  fs::remove_all(dir);
}
