#pragma once

// Multi-period capacity-expansion planning over representative days.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "solarzoning/geom_types.hpp"
#include "solarzoning/lp.hpp"
#include "solarzoning/resource.hpp"
#include "solarzoning/supply.hpp"

namespace solarzoning::expansion {

inline constexpr int kHoursPerDay = 24;

struct Region {
  std::string region_id;
  Point centroid;
  std::map<int, std::vector<double>> demand_8760;  // model year → hourly MWh
};

/// Bidirectional transport link; flow is positive from region_a to region_b.
struct TransmissionCorridor {
  std::string region_a;
  std::string region_b;
  double existing_capacity_mw = 0.0;
  double cost_usd_per_mw = 0.0;  // overnight cost of one MW of transfer capacity
  bool expandable = true;
};

struct RepDay {
  int day_index = 0;  // 0-based calendar day
  double weight_days = 0.0;
  bool is_peak = false;
};

/// Seasonal medoid-style selection: per season (DJF, MAM, JJA, SON) the
/// `days_per_season` days closest to the seasonal centroid of normalized
/// (demand, mean cf) daily profiles, plus the annual system-peak day with
/// weight 1. Each season's days share its remaining day count equally, so
/// the weights sum to 365. Returned in calendar order.
std::vector<RepDay> select_rep_days(const std::vector<double>& demand_8760,
                                    const std::vector<const resource::CapacityFactorSeries*>& cf_series,
                                    int days_per_season);

struct StorageParameters {
  double round_trip_efficiency = 0.85;
  double energy_capex_usd_per_kwh = 0.0;  // same in every period
};

struct PlanningProblem {
  std::vector<int> periods = {2020, 2025, 2030, 2035, 2040};
  std::vector<Region> regions;
  std::vector<TransmissionCorridor> corridors;
  std::vector<supply::SupplySite> solar_sites;
  std::vector<supply::SupplySite> wind_sites;
  std::vector<std::string> dispatchable_techs;  // cost table keys, e.g. "ngcc"
  bool storage_enabled = true;                  // cost table key "battery" (power)
  StorageParameters storage;
  resource::CostTable costs;  // keys: dispatchable techs, "solar", "wind", "battery"
  double transmission_discount_rate = 0.07;
  int transmission_lifetime_yr = 40;
  double reserve_margin = 0.15;
  double solar_share_target = 0.0;  // applied in the final period
  // region → technology (dispatchable name, "battery" MW, "battery_energy" MWh) → capacity
  std::map<std::string, std::map<std::string, double>> existing;
  int days_per_season = 2;
  std::vector<RepDay> rep_days;  // selected automatically when empty
  bool myopic = false;
};

// Throws ValidationError if the problem breaks a documented invariant.
void validate(const PlanningProblem& problem);

struct BuildRecord {
  int period;
  std::string region_id;
  std::string technology;  // "solar", "wind", dispatchable name, "battery", "battery_energy"
  std::string site_id;     // empty for region-level technologies
  double built_mw;         // MWh for battery_energy
  double annualized_cost_usd;  // capital recovery + fixed O&M attributed to this build over the horizon
};

struct TransmissionBuild {
  int period;
  std::string region_a;
  std::string region_b;
  double built_mw;
  double annualized_cost_usd;
};

struct HourlyDispatch {
  std::map<std::string, std::vector<double>> generation;  // technology → 24 values
  std::vector<double> charge, discharge, soc, demand;
};

struct DayDispatch {
  RepDay day;
  std::map<std::string, HourlyDispatch> regions;
  std::vector<std::vector<double>> flows;  // corridor index → 24 values
};

struct PeriodResult {
  int period;
  double objective_usd = 0.0;
  double solar_share = 0.0;
  double solar_generation_mwh = 0.0;
  double demand_mwh = 0.0;
  std::vector<DayDispatch> dispatch;
};

struct PlanResult {
  lp::Status status = lp::Status::Error;
  std::string diagnostic;
  double objective_usd = 0.0;
  std::vector<RepDay> rep_days;
  std::vector<BuildRecord> builds;
  std::vector<TransmissionBuild> transmission;
  std::vector<PeriodResult> periods;
  double max_balance_residual = 0.0;  // relative to max(demand, 1)
  double max_storage_cycle_residual = 0.0;

  double built_mw(const std::string& technology) const;
  // Capital recovery plus fixed O&M of solar across all periods.
  double annualized_solar_fixed_cost() const;
  // Capacity-weighted mean cf of built solar sites.
  double built_solar_mean_cf(const PlanningProblem& problem) const;
};

/// Variables and constraints of the joint multi-period LP (see
/// expansion.cpp for the naming scheme).
lp::LinearProgram assemble_lp(const PlanningProblem& problem);

/// Solves jointly (or period by period when `myopic`), extracts builds and
/// dispatch, and audits hourly balance and storage cycling from the raw
/// dispatch. Infeasible plans carry a "solar share unreachable" diagnostic
/// naming the required and available solar energy.
PlanResult run_plan(const PlanningProblem& problem, const lp::SolveOptions& options = {});

/// Final-period solar energy the site limits allow if every site is built
/// out and never curtailed, MWh (weighted over rep days).
double max_solar_energy_mwh(const PlanningProblem& problem, const std::vector<RepDay>& rep_days);

void write_plan_json(std::ostream& out, const PlanningProblem& problem, const PlanResult& result);
/// CSV columns: period, region, technology, built_mw, annualized_cost_usd.
void write_investments_csv(std::ostream& out, const PlanResult& result);

}  // namespace solarzoning::expansion
