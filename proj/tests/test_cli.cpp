#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "hrcp/error.hpp"

using namespace hrcp;

namespace {

std::string write_toml(const std::string& name, const std::string& body) {
  const auto dir = std::filesystem::temp_directory_path() / "hrcp_test_cli";
  std::filesystem::create_directories(dir);
  const auto p = (dir / name).string();
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("simulation plans parse with defaults") {
  const auto plan = cli::load_simulation_plan(write_toml("full.toml",
                                                         "seed = 9\nB = 300\nworkers = 2\n"
                                                         "[criticals]\nT = [50, 200]\nlambda = [0.5, 2]\n"
                                                         "[power]\nlambdaT = [0.5, 1.5]\nbeta = 0.25\n"
                                                         "[consistency]\nlambdaT = [0.5]\nlambda1 = 5.0\n"));
  CHECK(plan.seed == 9);
  CHECK(plan.B == 300);
  CHECK(plan.workers == 2);
  REQUIRE(plan.criticals);
  CHECK(plan.criticals->T == std::vector<std::size_t>{50, 200});
  CHECK(plan.criticals->lambda == std::vector<double>{0.5, 2.0});
  CHECK(plan.criticals->alpha == std::vector<double>{0.01, 0.05, 0.1});
  REQUIRE(plan.power);
  CHECK(plan.power->T == 200);
  CHECK(plan.power->beta == 0.25);
  CHECK_FALSE(plan.power->table.has_value());
  REQUIRE(plan.consistency);
  CHECK(plan.consistency->lambda1 == 5.0);
  CHECK(plan.consistency->deltas == std::vector<std::size_t>{1, 2, 3});

  const auto empty = cli::load_simulation_plan(write_toml("empty.toml", ""));
  CHECK(empty.B == 10000);
  CHECK_FALSE(empty.criticals.has_value());
  std::ostringstream log;
  CHECK_THROWS_AS(cli::run_criticals(empty, log), InputError);
}

TEST_CASE("ill-formed plans are input errors") {
  CHECK_THROWS_AS(cli::load_simulation_plan(write_toml("a.toml", "seed = \"x\"\n")), InputError);
  CHECK_THROWS_AS(cli::load_simulation_plan(write_toml("b.toml", "[criticals]\nT = [50]\n")), InputError);
  CHECK_THROWS_AS(cli::load_simulation_plan(write_toml("c.toml", "[power]\nlambdaT = [\"a\"]\n")), InputError);
  try {
    (void)cli::load_simulation_plan(write_toml("d.toml", "seed = 1\nB = = 2\n"));
    FAIL("expected a syntax error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("d.toml:2") != std::string::npos);
  }
}

TEST_CASE("criticals over a grid equal the per-cell tables") {
  const auto plan = cli::load_simulation_plan(
      write_toml("grid.toml", "seed = 4\nB = 150\n[criticals]\nT = [24, 30]\nlambda = [1.0]\nalpha = [0.1]\n"));
  std::ostringstream log;
  const auto table = cli::run_criticals(plan, log);
  REQUIRE(table.size() == 4);
  SimulationConfig c;
  c.B = 150;
  c.seed = 4;
  c.T = 30;
  c.lambda1 = DependenceParam(1.0);
  c.alphas = {0.1};
  const auto cell = simulate_critical_values(c);
  for (const auto& e : cell.entries()) CHECK(table.at(e.method, 30, 1.0, 0.1) == e);
  CHECK(log.str().find("T=24") != std::string::npos);
}

TEST_CASE("exit codes of the entry point") {
  const auto run = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::main_entry(static_cast<int>(argv.size()), argv.data());
  };
  CHECK(run({"hrcp"}) == cli::kInputError);
  CHECK(run({"hrcp", "--help"}) == cli::kOk);
  CHECK(run({"hrcp", "detect", "/nonexistent/a.csv", "/nonexistent/b.csv"}) == cli::kInputError);
  CHECK(run({"hrcp", "detect", "a.csv", "b.csv", "--tail", "sideways"}) == cli::kInputError);
  CHECK(run({"hrcp", "simulate", "power", write_toml("e.toml", "B = 50\n[power]\nlambdaT = [1]\n")}) ==
        cli::kInputError);
}
