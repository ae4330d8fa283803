#include <sstream>

#include "doctest.h"
#include "lp_instances.hpp"
#include "solarzoning/errors.hpp"
#include "solarzoning/expansion.hpp"

using namespace solarzoning;
using namespace solarzoning::expansion;
using sztest::AnalyticInstance;

namespace {

int find_var(const lp::LinearProgram& p, const std::string& name) {
  for (std::size_t j = 0; j < p.num_vars(); ++j) {
    if (p.var_name(static_cast<int>(j)) == name) return static_cast<int>(j);
  }
  FAIL("no variable " << name);
  return -1;
}

bool has_row_prefix(const lp::LinearProgram& p, const std::string& prefix) {
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    if (p.row_name(static_cast<int>(i)).rfind(prefix, 0) == 0) return true;
  }
  return false;
}

double total_period_objective(const PlanResult& r) {
  double s = 0.0;
  for (const auto& p : r.periods) s += p.objective_usd;
  return s;
}

void check_audits(const PlanResult& r) {
  CHECK(r.max_balance_residual <= 1e-6);
  CHECK(r.max_storage_cycle_residual <= 1e-6);
}

// Two periods, two regions, solar at two sites, storage and an expandable
// corridor: small enough to solve in well under a second.
PlanningProblem two_period_problem(double target) {
  PlanningProblem pb;
  pb.periods = {2030, 2040};
  pb.rep_days = {{10, 120.0, false}, {190, 244.0, false}, {200, 1.0, true}};
  auto demand = [](double base, double swing) {
    std::vector<double> d(resource::kHoursPerYear);
    for (int h = 0; h < resource::kHoursPerYear; ++h) d[h] = base + swing * ((h % 24) >= 17 && (h % 24) <= 21);
    return d;
  };
  auto a = sztest::region("A", 2030, demand(80, 30), {0, 0});
  a.demand_8760[2040] = demand(95, 35);
  auto b = sztest::region("B", 2030, demand(40, 10), {50000, 0});
  b.demand_8760[2040] = demand(50, 15);
  pb.regions = {a, b};
  pb.corridors = {{"A", "B", 20.0, 3e5, true}};
  pb.dispatchable_techs = {"gas", "peaker"};
  pb.costs.set("gas", 2030, sztest::gas_cost());
  pb.costs.set("peaker", 2030, sztest::cost(600.0, 8.0, 4.0, 60.0, 0.07, 20));
  pb.costs.set("solar", 2030, sztest::cost(1200.0, 15.0, 0.0, 0.0, 0.07, 25));
  pb.costs.set("solar", 2040, sztest::cost(900.0, 12.0, 0.0, 0.0, 0.07, 25));
  pb.costs.set("battery", 2030, sztest::cost(400.0, 10.0, 0.0, 0.0, 0.07, 15));
  pb.storage = {0.85, 250.0};
  pb.storage_enabled = true;
  pb.existing["A"]["gas"] = 60.0;
  pb.solar_sites = {
      sztest::site("a1", "A", 120.0, std::make_shared<resource::CapacityFactorSeries>(
                                         resource::synthetic_cf("a1", {0, 0}, 1))),
      sztest::site("b1", "B", 80.0, std::make_shared<resource::CapacityFactorSeries>(
                                        resource::synthetic_cf("b1", {50000, 0}, 2)))};
  pb.solar_share_target = target;
  return pb;
}

}  // namespace

TEST_CASE("analytic instances reach their hand-derived optima") {
  for (const AnalyticInstance& in : sztest::analytic_instances()) {
    CAPTURE(in.name);
    const auto r = run_plan(in.problem);
    if (!in.feasible) {
      CHECK(r.status == lp::Status::Infeasible);
      continue;
    }
    REQUIRE(r.status == lp::Status::Optimal);
    CHECK(r.objective_usd == doctest::Approx(in.objective).epsilon(1e-8));
    CHECK(total_period_objective(r) == doctest::Approx(r.objective_usd).epsilon(1e-9));
    check_audits(r);
  }
}

TEST_CASE("single technology is sized to peak plus reserve") {
  const auto r = run_plan(sztest::single_tech_sizing().problem);
  REQUIRE(r.status == lp::Status::Optimal);
  CHECK(r.built_mw("gas") == doctest::Approx(115.0));
  CHECK(r.built_mw("solar") == 0.0);
}

TEST_CASE("solar share is met at the best site; banning it builds more MW at lower cf") {
  const auto open = run_plan(sztest::two_site_solar(false).problem);
  const auto banned_problem = sztest::two_site_solar(true).problem;
  const auto banned = run_plan(banned_problem);
  REQUIRE(open.status == lp::Status::Optimal);
  REQUIRE(banned.status == lp::Status::Optimal);
  CHECK(open.built_mw("solar") == doctest::Approx(50.0));
  CHECK(open.built_mw("gas") == doctest::Approx(105.0));
  CHECK(open.periods.back().solar_share == doctest::Approx(0.1));
  CHECK(banned.built_mw("solar") == doctest::Approx(100.0));
  CHECK(banned.built_mw("solar") > open.built_mw("solar"));
  CHECK(banned.built_solar_mean_cf(banned_problem) == doctest::Approx(0.1));
  CHECK(open.built_solar_mean_cf(sztest::two_site_solar(false).problem) == doctest::Approx(0.2));
  CHECK(banned.annualized_solar_fixed_cost() > open.annualized_solar_fixed_cost());
  CHECK(banned.objective_usd > open.objective_usd);
}

TEST_CASE("transport limit forces a local build") {
  const auto r = run_plan(sztest::transport_bottleneck().problem);
  REQUIRE(r.status == lp::Status::Optimal);
  double in_b = 0.0;
  for (const auto& b : r.builds) {
    if (b.technology == "gas" && b.region_id == "B") in_b += b.built_mw;
  }
  CHECK(in_b == doctest::Approx(40.0));
  const auto& flows = r.periods.at(0).dispatch.at(0).flows.at(0);
  for (double f : flows) CHECK(f == doctest::Approx(60.0));
}

TEST_CASE("storage shifts cheap energy into the peak") {
  const auto r = run_plan(sztest::storage_arbitrage().problem);
  REQUIRE(r.status == lp::Status::Optimal);
  const auto& day = r.periods.at(0).dispatch.at(0).regions.at("R");
  double charged = 0.0, discharged = 0.0;
  for (int h = 0; h < kHoursPerDay; ++h) {
    charged += day.charge[h];
    discharged += day.discharge[h];
  }
  CHECK(charged == doctest::Approx(600.0));
  CHECK(discharged == doctest::Approx(486.0));
  CHECK(r.built_mw("battery") == 0.0);
  check_audits(r);
}

TEST_CASE("unreachable solar share is reported as infeasible") {
  const auto r = run_plan(sztest::infeasible_share().problem);
  CHECK(r.status == lp::Status::Infeasible);
  CHECK(r.diagnostic.rfind("solar share unreachable", 0) == 0);
  CHECK(max_solar_energy_mwh(sztest::infeasible_share().problem, {{0, 365.0, true}}) ==
        doctest::Approx(10.0 * 0.2 * 8760.0));
}

TEST_CASE("zero demand costs nothing") {
  auto pb = sztest::single_tech_sizing().problem;
  pb.regions = {sztest::region("R", 2030, sztest::flat(0.0))};
  const auto r = run_plan(pb);
  REQUIRE(r.status == lp::Status::Optimal);
  CHECK(r.objective_usd == doctest::Approx(0.0));
  for (const auto& b : r.builds) CHECK(b.built_mw == doctest::Approx(0.0));
}

TEST_CASE("zero target adds no share constraint") {
  auto pb = sztest::two_site_solar().problem;
  pb.solar_share_target = 0.0;
  CHECK_FALSE(has_row_prefix(assemble_lp(pb), "solar_share"));
  pb.solar_share_target = 0.1;
  CHECK(has_row_prefix(assemble_lp(pb), "solar_share"));
}

TEST_CASE("representative days cover the year") {
  std::vector<double> demand(resource::kHoursPerYear);
  for (int h = 0; h < resource::kHoursPerYear; ++h) demand[h] = 100.0 + 20.0 * std::sin(h * 0.01) + (h % 24);
  demand[250 * 24 + 18] = 900.0;
  const auto cf = resource::synthetic_cf("S", {0, 0}, 3);
  for (int dps : {1, 2, 3}) {
    const auto days = select_rep_days(demand, {&cf}, dps);
    CHECK(days.size() == static_cast<std::size_t>(4 * dps + 1));
    double w = 0.0;
    int peaks = 0;
    for (const auto& d : days) {
      w += d.weight_days;
      if (d.is_peak) {
        ++peaks;
        CHECK(d.day_index == 250);
        CHECK(d.weight_days == 1.0);
      }
    }
    CHECK(w == doctest::Approx(365.0));
    CHECK(peaks == 1);
    CHECK(std::is_sorted(days.begin(), days.end(),
                         [](const RepDay& a, const RepDay& b) { return a.day_index < b.day_index; }));
  }
}

TEST_CASE("validation rejects malformed problems") {
  auto pb = sztest::single_tech_sizing().problem;
  pb.rep_days = {{0, 300.0, true}};
  CHECK_THROWS_AS(validate(pb), ValidationError);
  pb = sztest::single_tech_sizing().problem;
  pb.existing["R"]["solar"] = 10.0;
  CHECK_THROWS_AS(validate(pb), ValidationError);
  pb = sztest::single_tech_sizing().problem;
  pb.existing["nowhere"]["gas"] = 10.0;
  CHECK_THROWS_AS(validate(pb), ValidationError);
  pb = sztest::single_tech_sizing().problem;
  pb.dispatchable_techs.push_back("coal");
  CHECK_THROWS_AS(validate(pb), ValidationError);
}

TEST_CASE("property: LP optimum is no worse than any point of a brute-force build grid") {
  // Build variables: gas, solar at the 0.2 site and at the 0.1 site. For
  // each grid point the builds are fixed and only dispatch is optimized.
  auto pb = sztest::two_site_solar().problem;
  pb.solar_sites[0].capacity_mw = 100.0;
  pb.solar_sites[1].capacity_mw = 100.0;
  const auto base = assemble_lp(pb);
  const int vars[3] = {find_var(base, "build_gas_R_2030"), find_var(base, "build_solar_hi_2030"),
                       find_var(base, "build_solar_lo_2030")};
  const double hi[3] = {200.0, 100.0, 100.0};
  const int steps = 10;
  const auto opt = lp::solve(base);
  REQUIRE(opt.status == lp::Status::Optimal);

  double best = lp::kInf;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps; ++j) {
      for (int k = 0; k <= steps; ++k) {
        auto fixed = base;
        const int idx[3] = {i, j, k};
        for (int v = 0; v < 3; ++v) {
          const double x = hi[v] * idx[v] / steps;
          fixed.set_bounds(vars[v], x, x);
        }
        const auto s = lp::solve(fixed);
        if (s.status == lp::Status::Optimal) best = std::min(best, s.objective);
      }
    }
  }
  REQUIRE(best < lp::kInf);
  CHECK(opt.objective <= best * (1 + 1e-9));
  // Rounding each optimal build up to the grid stays feasible and cannot
  // raise dispatch cost, so the gap is bounded by one grid step of capital.
  double gap = 0.0;
  for (int v = 0; v < 3; ++v) gap += hi[v] / steps * base.cost(vars[v]);
  CHECK(best - opt.objective <= gap * (1 + 1e-9));
}

TEST_CASE("property: multi-period plans pass audits and cost more with higher targets") {
  double previous = -1.0;
  for (double target : {0.0, 0.05, 0.1, 0.2}) {
    CAPTURE(target);
    const auto pb = two_period_problem(target);
    const auto r = run_plan(pb);
    REQUIRE(r.status == lp::Status::Optimal);
    check_audits(r);
    CHECK(total_period_objective(r) == doctest::Approx(r.objective_usd).epsilon(1e-9));
    CHECK(r.periods.back().solar_share >= target - 1e-9);
    CHECK(r.objective_usd >= previous * (1 - 1e-9));
    previous = r.objective_usd;
  }
}

TEST_CASE("property: shrinking site limits never lowers the optimum") {
  Rng rng(88);
  const auto pb = two_period_problem(0.1);
  const double full = run_plan(pb).objective_usd;
  for (int trial = 0; trial < 4; ++trial) {
    auto smaller = pb;
    for (auto& s : smaller.solar_sites) s.capacity_mw *= sztest::uniform(rng, 0.6, 1.0);
    const auto r = run_plan(smaller);
    if (r.status == lp::Status::Optimal) CHECK(r.objective_usd >= full * (1 - 1e-9));
  }
}

TEST_CASE("myopic plans are feasible and never beat perfect foresight") {
  auto pb = two_period_problem(0.1);
  const auto joint = run_plan(pb);
  pb.myopic = true;
  const auto myopic = run_plan(pb);
  REQUIRE(joint.status == lp::Status::Optimal);
  REQUIRE(myopic.status == lp::Status::Optimal);
  check_audits(myopic);
  CHECK(myopic.objective_usd >= joint.objective_usd * (1 - 1e-9));
  CHECK(myopic.periods.size() == 2);
}

TEST_CASE("plan outputs") {
  const auto in = sztest::single_tech_sizing();
  const auto r = run_plan(in.problem);
  std::ostringstream csv;
  write_investments_csv(csv, r);
  CHECK(csv.str().rfind("period,region,technology,built_mw,annualized_cost_usd\n", 0) == 0);
  const auto row = csv.str().find("2030,R,gas,");
  REQUIRE(row != std::string::npos);
  CHECK(std::stod(csv.str().substr(row + 11)) == doctest::Approx(115.0));
  std::ostringstream json;
  write_plan_json(json, in.problem, r);
  CHECK(json.str().find("\"status\"") != std::string::npos);
}
