#include <fstream>
#include <sstream>

#include "doctest.h"
#include "solarzoning/pipeline.hpp"
#include "solarzoning/synthetic.hpp"
#include "support.hpp"

using namespace solarzoning;
using namespace solarzoning::pipeline;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Small synthetic study area plus a config pointing at it.
fs::path small_study(const std::string& name) {
  const fs::path dir = sztest::scratch_dir(name);
  synthetic::Spec spec;
  spec.seed = 5;
  spec.regions = 1;
  spec.columns = 3;
  spec.rows = 2;
  dataset::write(synthetic::generate(spec), dir / "data");
  write_text(dir / "config.json", R"({
  "scenario": "baseline",
  "solar_share_target": 0.05,
  "seed": 11,
  "inputs": {"dir": "data"},
  "supply": {"top_site_fraction": 1.0},
  "expansion": {"periods": [2030, 2040], "days_per_season": 1}
})");
  return dir;
}

}  // namespace

TEST_CASE("config loading resolves paths and fills defaults") {
  const fs::path dir = small_study("config");
  const auto c = load_config(dir / "config.json");
  CHECK(c.scenario == zoning::ScenarioKind::Baseline);
  CHECK(c.seed == 11);
  CHECK(c.inputs.ordinances == dir / "data" / "ordinances.csv");
  CHECK(c.periods == std::vector<int>{2030, 2040});
  CHECK(c.days_per_season == 1);
  CHECK(c.participation_rate == 0.3);
  CHECK(c.solar_power_density_w_per_m2 == 7.1);
  CHECK(c.wind_power_density_w_per_m2 == 0.8);
  CHECK(config_json(c).find("\"reserve_margin\"") != std::string::npos);
}

TEST_CASE("config errors name the file and the problem") {
  const fs::path dir = sztest::scratch_dir("config-errors");
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);

  const auto expect = [&](const std::string& text, const std::string& fragment) {
    write_text(dir / "c.json", text);
    try {
      load_config(dir / "c.json");
      FAIL("accepted: " << text);
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      CHECK(what.find("c.json") != std::string::npos);
      CHECK_MESSAGE(what.find(fragment) != std::string::npos, what);
    }
  };
  expect("{not json", "c.json");
  expect(R"({"scenario": "lenient"})", "scenario");
  expect(R"({"solar_share_target": 1.5})", "solar_share_target");
  expect(R"({"solar_share_target": "high"})", "solar_share_target");
  expect(R"({"expansion": {"days_per_season": 0}})", "days_per_season");
}

TEST_CASE("comparison CSV format and percentage change") {
  std::ostringstream out;
  write_comparison(out, {{"objective_usd", 200.0, 250.0}, {"built_solar_mw", 0.0, 5.0}, {"built_wind_mw", 0.0, 0.0},
                         {"x", 3.0, 2.0}});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "metric,run_a,run_b,pct_change");
  std::getline(in, line);
  CHECK(line.rfind("objective_usd,", 0) == 0);
  CHECK(line.substr(line.rfind(',') + 1) == "25.0");
  std::getline(in, line);
  CHECK(line.substr(line.rfind(',') + 1) == "NA");
  std::getline(in, line);
  CHECK(line.substr(line.rfind(',') + 1) == "0.0");
  std::getline(in, line);
  CHECK(line.substr(line.rfind(',') + 1) == "-33.3");
}

TEST_CASE("a small synthetic run is complete, deterministic and comparable") {
  const fs::path dir = small_study("run");
  auto config = load_config(dir / "config.json");
  const auto first = run_scenario(config, dir / "out1");
  REQUIRE_MESSAGE(first.exit_code == kOk, first.message);
  const auto second = run_scenario(config, dir / "out2");
  REQUIRE(second.exit_code == kOk);
  for (const char* f : {"supply_curve.csv", "waterfall.csv", "investments.csv", "plan.json", "run_metadata.json",
                        "supply_curves.svg", "capacity_by_region.svg"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(dir / "out1" / f));
    CHECK(sztest::slurp(dir / "out1" / f) == sztest::slurp(dir / "out2" / f));
  }

  config.scenario = zoning::ScenarioKind::Unregulated;
  REQUIRE(run_scenario(config, dir / "unreg").exit_code == kOk);
  const auto rows = compare_runs(dir / "unreg", dir / "out1");
  REQUIRE(!rows.empty());
  CHECK(rows[0].metric == "objective_usd");
  CHECK(rows[0].run_b >= rows[0].run_a * (1 - 1e-9));
}

TEST_CASE("an unreachable target exits with the infeasible code and leaves no output") {
  const fs::path dir = small_study("infeasible");
  auto config = load_config(dir / "config.json");
  config.solar_share_target = 0.99;
  config.storage_enabled = false;
  const auto o = run_scenario(config, dir / "out");
  CHECK(o.exit_code == kInfeasible);
  CHECK(o.message.find("solar share unreachable") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("runs with different dimensions refuse to compare") {
  const fs::path dir = small_study("dims");
  auto config = load_config(dir / "config.json");
  REQUIRE(run_scenario(config, dir / "a").exit_code == kOk);
  config.periods = {2040};
  REQUIRE(run_scenario(config, dir / "b").exit_code == kOk);
  CHECK_THROWS_AS(compare_runs(dir / "a", dir / "b"), ValidationError);
}

TEST_CASE("export-lp writes a readable MPS file") {
  const fs::path dir = small_study("mps");
  const auto config = load_config(dir / "config.json");
  REQUIRE(export_lp(config, dir / "plan.mps").exit_code == kOk);
  std::ifstream in(dir / "plan.mps");
  const auto p = lp::read_mps(in);
  CHECK(p.num_vars() > 0);
  CHECK(p.num_rows() > 0);
}
