#pragma once

// Scenario configuration and the zoning → parcels → geometry → supply →
// expansion pipeline behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "solarzoning/dataset.hpp"
#include "solarzoning/errors.hpp"
#include "solarzoning/expansion.hpp"
#include "solarzoning/geometry.hpp"
#include "solarzoning/parcels.hpp"
#include "solarzoning/supply.hpp"
#include "solarzoning/zoning.hpp"

namespace solarzoning::pipeline {

enum ExitCode : int { kOk = 0, kConfigError = 2, kInfeasible = 3, kInternalError = 4 };

// A config file that is malformed or references unusable inputs.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct ScenarioConfig {
  std::filesystem::path config_path;  // empty for in-memory configs
  zoning::ScenarioKind scenario = zoning::ScenarioKind::Baseline;
  double solar_share_target = 0.10;
  std::uint64_t seed = 2040;
  dataset::Paths inputs;  // resolved against the config file's directory

  std::vector<double> parcel_sizes_ha = {16.0, 32.0, 65.0};
  double participation_rate = 0.3;
  double solar_power_density_w_per_m2 = supply::kSolarPowerDensity_w_m2;
  double wind_power_density_w_per_m2 = supply::kWindPowerDensity_w_m2;
  zoning::RuleLimits unzoned_defaults = zoning::default_unzoned_limits();
  double top_site_fraction = 0.2;
  bool include_wind = true;

  std::vector<int> periods = {2020, 2025, 2030, 2035, 2040};
  double reserve_margin = 0.15;
  int days_per_season = 2;
  std::vector<std::string> dispatchable_techs = {"ngcc", "ngcc_ccs", "coal_ccs", "nuclear"};
  bool storage_enabled = true;
  expansion::StorageParameters storage{0.85, 250.0};
  double demand_growth_per_yr = 0.015;
  double transmission_discount_rate = 0.07;
  int transmission_lifetime_yr = 40;
  bool myopic = false;
};

/// Parses a JSON config. Relative input paths resolve against the config
/// file's directory. Throws ConfigError naming the file and key.
ScenarioConfig load_config(const std::filesystem::path& path);
/// The config with every default filled in, as JSON text.
std::string config_json(const ScenarioConfig& config);
// Throws ConfigError for out-of-range values.
void validate(const ScenarioConfig& config);

/// Scenario-independent land and resource model.
struct LandModel {
  std::vector<parcels::Parcel> parcels;  // classified, exclusions applied
  std::map<std::string, supply::SiteEconomics> solar;
  std::map<std::string, supply::SiteEconomics> wind;
};

/// Per-subdivision solar economics at `cost_year` prices: cf (override or
/// synthetic), interconnection cost from the centroid, lcoe and levelized
/// transmission cost.
std::map<std::string, supply::SiteEconomics> solar_economics(const dataset::Dataset& data, std::uint64_t seed,
                                                             int cost_year);
std::map<std::string, supply::SiteEconomics> wind_economics(const dataset::Dataset& data, std::uint64_t seed,
                                                            int cost_year);

LandModel build_land_model(const dataset::Dataset& data, const ScenarioConfig& config);

struct ScenarioSupply {
  zoning::ScenarioKind scenario;
  std::map<std::string, zoning::EffectiveRule> rules;
  std::vector<geometry::DevelopableArea> areas;  // parallel to LandModel::parcels
  std::vector<supply::SupplySite> solar_sites;   // every subdivision
  std::vector<supply::SupplySite> wind_sites;    // every subdivision, unregulated land
  supply::SupplyCurve curve;
};

ScenarioSupply evaluate_scenario(const dataset::Dataset& data, const LandModel& land, const ScenarioConfig& config,
                                 zoning::ScenarioKind scenario);

/// Expansion problem for one scenario. Candidate sites are the top
/// fraction ranked on scenario-independent levelized transmission cost, so
/// every scenario sees the same site list with scenario-specific limits.
expansion::PlanningProblem make_problem(const dataset::Dataset& data, const LandModel& land,
                                        const ScenarioConfig& config, const ScenarioSupply& supply);

struct Outcome {
  int exit_code = kOk;
  std::string message;
};

/// Full run. Artifacts are written to a sibling temporary directory and
/// renamed onto `out_dir` only on success (an existing `out_dir` is
/// replaced).
Outcome run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

/// Parcels with edge classes and scenario developable footprints as
/// GeoJSON, plus a per-parcel CSV; optionally one subdivision only.
Outcome geometry_debug(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                       const std::optional<std::string>& subdivision);

/// Writes the scenario's expansion LP in MPS format.
Outcome export_lp(const ScenarioConfig& config, const std::filesystem::path& mps_path);

struct CompareRow {
  std::string metric;
  double run_a;
  double run_b;
};

/// Metrics of two run directories (from plan.json). Throws ValidationError
/// if their periods, regions or technologies differ.
std::vector<CompareRow> compare_runs(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b);
/// CSV columns metric, run_a, run_b, pct_change; pct_change is
/// 100·(b − a)/a to one decimal, "NA" when a is 0 and b is not.
void write_comparison(std::ostream& out, const std::vector<CompareRow>& rows);

}  // namespace solarzoning::pipeline
