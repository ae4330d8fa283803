#pragma once

// Hand-constructed planning problems with optima worked out by hand.

#include <string>
#include <vector>

#include "support.hpp"

namespace sztest {

struct AnalyticInstance {
  std::string name;
  expansion::PlanningProblem problem;
  bool feasible = true;
  double objective = 0.0;  // hand-derived optimum when feasible
};

inline resource::CostAssumptions gas_cost() { return cost(1000.0, 10.0, 2.0, 20.0, 0.07, 20); }

// Flat 100 MW demand served by one thermal technology: build
// 100·(1 + margin) MW and run 100 MW every hour.
inline AnalyticInstance single_tech_sizing() {
  AnalyticInstance in{"single_tech_sizing", one_day_problem(), true, 0.0};
  auto& pb = in.problem;
  pb.regions = {region("R", 2030, flat(100.0))};
  pb.dispatchable_techs = {"gas"};
  pb.costs.set("gas", 2030, gas_cost());
  pb.reserve_margin = 0.15;
  in.objective = 115.0 * annual_per_mw(gas_cost()) + 8760.0 * 100.0 * 22.0;
  return in;
}

// Two flat-cf solar sites (0.20 and 0.10) with identical costs. A 10%
// share of 876,000 MWh needs 50 MW at the better site; its 0.2 reserve
// credit per MW trims the thermal build to 105 MW, which runs at 90 MW.
// With `ban_best` the 0.20 site has no capacity, so 100 MW go to the 0.10
// site and thermal is 105 MW again (100 · 0.1 credit).
inline AnalyticInstance two_site_solar(bool ban_best = false) {
  AnalyticInstance in{ban_best ? "two_site_solar_banned" : "two_site_solar", one_day_problem(), true, 0.0};
  auto& pb = in.problem;
  pb.regions = {region("R", 2030, flat(100.0))};
  pb.dispatchable_techs = {"gas"};
  pb.costs.set("gas", 2030, gas_cost());
  const auto solar = cost(3000.0, 0.0, 0.0, 0.0, 0.07, 20);
  pb.costs.set("solar", 2030, solar);
  pb.solar_sites = {site("hi", "R", ban_best ? 0.0 : 1000.0, flat_cf("hi", 0.20)),
                    site("lo", "R", 1000.0, flat_cf("lo", 0.10))};
  pb.solar_share_target = 0.10;
  const double solar_mw = ban_best ? 100.0 : 50.0;
  in.objective = solar_mw * annual_per_mw(solar) + 105.0 * annual_per_mw(gas_cost()) + 8760.0 * 90.0 * 22.0;
  return in;
}

// Region B (100 MW demand) imports over a fixed 60 MW link from region A,
// which holds 1,000 MW of existing thermal; B builds the missing 40 MW.
inline AnalyticInstance transport_bottleneck() {
  AnalyticInstance in{"transport_bottleneck", one_day_problem(), true, 0.0};
  auto& pb = in.problem;
  pb.regions = {region("A", 2030, flat(0.0), {0, 0}), region("B", 2030, flat(100.0), {100000, 0})};
  pb.dispatchable_techs = {"gas"};
  pb.costs.set("gas", 2030, gas_cost());
  pb.corridors = {{"A", "B", 60.0, 1e5, false}};
  pb.existing["A"]["gas"] = 1000.0;
  in.objective = 40.0 * annual_per_mw(gas_cost()) + 1000.0 * 10.0 * 1000.0 + 8760.0 * 100.0 * 22.0;
  return in;
}

// Existing base (fuel 10) and peak (fuel 100) units of 100 MW each and a
// 50 MW / 1,000 MWh battery at 81% round trip. Demand is 50 MW for hours
// 0-11 and 150 MW for 12-23. Base runs flat out (2,400 MWh), charging
// 600 MWh off-peak that returns 486 MWh at peak; peak units make the
// remaining 150·12 − 1,200 − 486 = 114 MWh per day.
inline AnalyticInstance storage_arbitrage() {
  AnalyticInstance in{"storage_arbitrage", one_day_problem(), true, 0.0};
  auto& pb = in.problem;
  std::vector<double> demand(resource::kHoursPerYear);
  for (int h = 0; h < resource::kHoursPerYear; ++h) demand[h] = h % 24 < 12 ? 50.0 : 150.0;
  pb.regions = {region("R", 2030, demand)};
  pb.dispatchable_techs = {"base", "peak"};
  pb.costs.set("base", 2030, cost(1e5, 0.0, 0.0, 10.0));
  pb.costs.set("peak", 2030, cost(1e5, 0.0, 0.0, 100.0));
  pb.costs.set("battery", 2030, cost(1e5, 0.0, 0.0, 0.0, 0.07, 15));
  pb.storage_enabled = true;
  pb.storage = {0.81, 1e5};
  pb.existing["R"] = {{"base", 100.0}, {"peak", 100.0}, {"battery", 50.0}, {"battery_energy", 1000.0}};
  in.objective = 365.0 * (2400.0 * 10.0 + 114.0 * 100.0);
  return in;
}

// One 10 MW solar site at cf 0.2 cannot supply half of a flat 100 MW load.
inline AnalyticInstance infeasible_share() {
  AnalyticInstance in{"infeasible_share", one_day_problem(), false, 0.0};
  auto& pb = in.problem;
  pb.regions = {region("R", 2030, flat(100.0))};
  pb.dispatchable_techs = {"gas"};
  pb.costs.set("gas", 2030, gas_cost());
  pb.costs.set("solar", 2030, cost(1000.0, 10.0, 0.0, 0.0));
  pb.solar_sites = {site("only", "R", 10.0, flat_cf("only", 0.2))};
  pb.solar_share_target = 0.5;
  return in;
}

inline std::vector<AnalyticInstance> analytic_instances() {
  return {single_tech_sizing(), two_site_solar(), transport_bottleneck(), storage_arbitrage(), infeasible_share()};
}

}  // namespace sztest
