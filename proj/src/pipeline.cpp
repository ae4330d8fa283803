#include "solarzoning/pipeline.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "solarzoning/csv.hpp"
#include "solarzoning/errors.hpp"
#include "solarzoning/geojson.hpp"
#include "solarzoning/log.hpp"
#include "solarzoning/parallel.hpp"
#include "solarzoning/planar.hpp"
#include "solarzoning/random.hpp"
#include "solarzoning/svg.hpp"

#ifndef SOLARZONING_VERSION
#define SOLARZONING_VERSION "0.0.0"
#endif

namespace solarzoning::pipeline {
namespace fs = std::filesystem;
namespace {

using Json = nlohmann::ordered_json;

constexpr double kSquareMetersPerHectare = 10'000.0;
constexpr double kMetersPerMile = 1609.344;

std::uint64_t parcel_seed(std::uint64_t seed, const std::string& subdivision_id) {
  return derive_seed(seed, "parcels:" + subdivision_id);
}
std::uint64_t participation_seed(std::uint64_t seed) { return derive_seed(seed, "participation"); }
std::uint64_t progressive_seed(std::uint64_t seed) { return derive_seed(seed, "progressive"); }

// ---- config parsing ----

class Reader {
 public:
  Reader(const Json& j, std::string where, std::string file) : j_(j), where_(std::move(where)), file_(std::move(file)) {
    if (!j_.is_object()) fail("expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(std::string("bad value for '") + key + "'");
    }
  }

  void path(const char* key, fs::path& out) {
    std::string s;
    get(key, s);
    if (j_.contains(key)) out = s;
  }

  std::optional<Reader> object(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) return std::nullopt;
    return Reader(j_.at(key), where_ + key + ".", file_);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) fail("unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(file_ + ": " + (where_.empty() ? "" : where_.substr(0, where_.size() - 1) + ": ") + what);
  }

 private:
  const Json& j_;
  std::string where_;
  std::string file_;
  std::set<std::string> seen_;
};

double or_infinity(const Json& j) { return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>(); }

Json to_json(const zoning::RuleLimits& l) {
  Json j;
  j["road_setback_m"] = l.road_setback_m;
  j["ppl_setback_m"] = l.ppl_setback_m;
  j["nppl_setback_m"] = l.nppl_setback_m;
  j["min_lot_size_m2"] = l.min_lot_size_m2;
  j["max_lot_size_m2"] = std::isinf(l.max_lot_size_m2) ? Json(nullptr) : Json(l.max_lot_size_m2);
  return j;
}

Json config_to_json(const ScenarioConfig& c) {
  const auto p = [](const fs::path& path) { return path.generic_string(); };
  Json j;
  j["scenario"] = std::string(zoning::to_string(c.scenario));
  j["solar_share_target"] = c.solar_share_target;
  j["seed"] = c.seed;
  j["inputs"] = {{"ordinances", p(c.inputs.ordinances)},   {"subdivisions", p(c.inputs.subdivisions)},
                 {"roads", p(c.inputs.roads)},             {"transmission", p(c.inputs.transmission)},
                 {"exclusions", p(c.inputs.exclusions)},   {"costs", p(c.inputs.costs)},
                 {"regions", p(c.inputs.regions)},         {"demand", p(c.inputs.demand)},
                 {"corridors", p(c.inputs.corridors)},     {"existing_fleet", p(c.inputs.existing_fleet)},
                 {"cf_override", p(c.inputs.cf_override)}};
  j["parcels"] = {{"sizes_ha", c.parcel_sizes_ha}, {"participation_rate", c.participation_rate}};
  j["supply"] = {{"solar_power_density_w_per_m2", c.solar_power_density_w_per_m2},
                 {"wind_power_density_w_per_m2", c.wind_power_density_w_per_m2},
                 {"top_site_fraction", c.top_site_fraction},
                 {"include_wind", c.include_wind},
                 {"unzoned_defaults", to_json(c.unzoned_defaults)}};
  j["expansion"] = {{"periods", c.periods},
                    {"reserve_margin", c.reserve_margin},
                    {"days_per_season", c.days_per_season},
                    {"dispatchable_techs", c.dispatchable_techs},
                    {"storage",
                     {{"enabled", c.storage_enabled},
                      {"round_trip_efficiency", c.storage.round_trip_efficiency},
                      {"energy_capex_usd_per_kwh", c.storage.energy_capex_usd_per_kwh}}},
                    {"demand_growth_per_yr", c.demand_growth_per_yr},
                    {"transmission_discount_rate", c.transmission_discount_rate},
                    {"transmission_lifetime_yr", c.transmission_lifetime_yr},
                    {"myopic", c.myopic}};
  return j;
}

// ---- run plumbing ----

struct StageError : std::runtime_error {
  StageError(std::string stage, int code, const std::string& what)
      : std::runtime_error(stage + ": " + what), code(code) {}
  int code;
};

template <class F>
auto stage(const char* name, F&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const ParseError& e) {
    throw StageError(name, kConfigError, e.what());
  } catch (const ValidationError& e) {
    throw StageError(name, kConfigError, e.what());
  } catch (const std::exception& e) {
    throw StageError(name, kInternalError, e.what());
  }
}

template <class F>
Outcome guarded(F&& fn) {
  try {
    return fn();
  } catch (const StageError& e) {
    return {e.code, e.what()};
  } catch (const ParseError& e) {
    return {kConfigError, e.what()};
  } catch (const ValidationError& e) {
    return {kConfigError, e.what()};
  } catch (const std::exception& e) {
    return {kInternalError, std::string("internal error: ") + e.what()};
  }
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  return out;
}

// Collects artifacts in a sibling temporary directory; commit() swaps it
// into place, otherwise the destructor removes it.
class StagingDir {
 public:
  explicit StagingDir(fs::path target) : target_(std::move(target)) {
    if (target_.filename().empty()) target_ = target_.parent_path();
    const fs::path parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
    fs::create_directories(parent);
    temp_ = parent / ("." + target_.filename().string() + ".tmp-" + std::to_string(::getpid()));
    fs::remove_all(temp_);
    fs::create_directories(temp_);
  }
  ~StagingDir() {
    std::error_code ec;
    if (!committed_) fs::remove_all(temp_, ec);
  }
  StagingDir(const StagingDir&) = delete;
  StagingDir& operator=(const StagingDir&) = delete;

  fs::path operator/(const std::string& name) const { return temp_ / name; }

  void commit() {
    fs::remove_all(target_);
    fs::rename(temp_, target_);
    committed_ = true;
  }

 private:
  fs::path target_, temp_;
  bool committed_ = false;
};

std::map<std::string, supply::SiteEconomics> economics(const dataset::Dataset& data, std::uint64_t seed, int year,
                                                       const std::string& tech) {
  const resource::CostAssumptions& costs = data.costs.get(tech, year);
  std::vector<std::pair<std::string, supply::SiteEconomics>> rows(data.subdivisions.size());
  parallel_for(data.subdivisions.size(), [&](std::size_t i) {
    const auto& sub = data.subdivisions[i];
    const Point c = planar::centroid(sub.polygon);
    std::shared_ptr<const resource::CapacityFactorSeries> cf;
    const auto o = data.cf_override.find(sub.subdivision_id);
    if (tech == "solar" && o != data.cf_override.end()) {
      cf = std::make_shared<resource::CapacityFactorSeries>(o->second);
    } else if (tech == "solar") {
      cf = std::make_shared<resource::CapacityFactorSeries>(resource::synthetic_cf(sub.subdivision_id, c, seed));
    } else {
      cf = std::make_shared<resource::CapacityFactorSeries>(resource::synthetic_wind_cf(sub.subdivision_id, c, seed));
    }
    const double ic = resource::interconnection_cost(c, data.transmission, costs);
    rows[i] = {sub.subdivision_id,
               {sub.region_id, resource::lcoe(cf->mean_cf, costs, ic), ic,
                resource::levelized_transmission_cost(cf->mean_cf, costs, ic), cf}};
  });
  return {rows.begin(), rows.end()};
}

std::vector<supply::SupplyCurve> output_curves(const supply::Waterfall& w, const ScenarioSupply& s) {
  std::vector<supply::SupplyCurve> curves{w.unregulated_curve};
  for (const auto& l : w.layers) curves.push_back(l.curve);
  if (s.scenario == zoning::ScenarioKind::Progressive) curves.push_back(s.curve);
  return curves;
}

std::vector<std::string> technologies(const expansion::PlanningProblem& pb) {
  std::vector<std::string> t = {"solar"};
  if (!pb.wind_sites.empty()) t.push_back("wind");
  t.insert(t.end(), pb.dispatchable_techs.begin(), pb.dispatchable_techs.end());
  if (pb.storage_enabled) {
    t.push_back("battery");
    t.push_back("battery_energy");
  }
  return t;
}

Json metadata(const ScenarioConfig& config, const dataset::Dataset& data, const LandModel& land,
              const ScenarioSupply& supply, const supply::Waterfall& w, const expansion::PlanningProblem& pb,
              const expansion::PlanResult& plan) {
  Json j;
  j["tool"] = "solarzoning";
  j["version"] = SOLARZONING_VERSION;
  j["solver"] = lp::solver_version();
  j["config"] = config_to_json(config);
  j["seeds"] = {{"global", config.seed},
                {"participation", participation_seed(config.seed)},
                {"progressive_sampling", progressive_seed(config.seed)},
                {"parcels", "derive_seed(global, \"parcels:\" + subdivision_id)"},
                {"solar_cf", "derive_seed(global, \"solar:\" + subdivision_id)"},
                {"wind_cf", "derive_seed(global, \"wind:\" + subdivision_id)"}};
  Json layers = Json::array();
  for (auto l : supply::kLayerOrder) layers.push_back(std::string(supply::to_string(l)));
  std::set<std::string> silent;
  for (const auto& r : data.ordinances) {
    if (r.zoned && r.silent) silent.insert(r.jurisdiction_id);
  }
  Json sampled = Json::object();
  if (supply.scenario == zoning::ScenarioKind::Progressive) {
    for (const auto& id : silent) sampled[id] = to_json(supply.rules.at(id).limits());
  }
  j["decisions"] = {
      {"layer_order", layers},
      {"erosion_order", {"road", "ppl", "nppl"}},
      {"arc_points_per_circle", geometry::kArcResolution},
      {"reserve_margin", pb.reserve_margin},
      {"reserve_credit", "dispatchable and storage power at nameplate, solar and wind at their cf in the system peak hour"},
      {"progressive_sampling", "uniform with replacement over distinct permissive rules"},
      {"progressive_draws", sampled},
      {"top_site_rule", "ceil(fraction * subdivisions) lowest levelized transmission cost, ties by subdivision_id"},
      {"top_site_fraction", config.top_site_fraction},
      {"share_constraint", "final period only"},
      {"objective", "capital recovery and fixed O&M per period plus rep-day weighted fuel and variable O&M"},
      {"rep_day_selection", "seasonal medoids plus the system peak day"}};
  j["dimensions"] = {{"periods", pb.periods}, {"regions", Json::array()}, {"technologies", technologies(pb)}};
  for (const auto& r : pb.regions) j["dimensions"]["regions"].push_back(r.region_id);
  j["counts"] = {{"subdivisions", data.subdivisions.size()},
                 {"parcels", land.parcels.size()},
                 {"candidate_solar_sites", pb.solar_sites.size()},
                 {"candidate_wind_sites", pb.wind_sites.size()},
                 {"rep_days", plan.rep_days.size()}};
  j["supply"] = {{"unregulated_mw", w.unregulated_mw},
                 {"baseline_mw", w.baseline_mw},
                 {"scenario_mw", supply.curve.total_mw()}};
  return j;
}

std::map<std::string, std::map<std::string, double>> final_capacity(const expansion::PlanningProblem& pb,
                                                                    const expansion::PlanResult& plan) {
  std::map<std::string, std::map<std::string, double>> cap;
  for (const auto& r : pb.regions) cap[r.region_id];
  for (const auto& [region, techs] : pb.existing) {
    for (const auto& [tech, mw] : techs) {
      if (tech != "battery_energy") cap[region][tech] += mw;
    }
  }
  for (const auto& b : plan.builds) {
    if (b.technology != "battery_energy") cap[b.region_id][b.technology] += b.built_mw;
  }
  return cap;
}

struct Prepared {
  dataset::Dataset data;
  LandModel land;
  ScenarioSupply supply;
  expansion::PlanningProblem problem;
};

Prepared prepare(const ScenarioConfig& config) {
  Prepared p;
  stage("config", [&] {
    validate(config);
    return 0;
  });
  p.data = stage("inputs", [&] { return dataset::read(config.inputs); });
  p.land = stage("parcels", [&] { return build_land_model(p.data, config); });
  p.supply = stage("supply", [&] { return evaluate_scenario(p.data, p.land, config, config.scenario); });
  p.problem = stage("expansion", [&] { return make_problem(p.data, p.land, config, p.supply); });
  return p;
}

std::string pct_change(double a, double b) {
  if (a == 0.0) return b == 0.0 ? "0.0" : "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * (b - a) / a);
  std::string s = buf;
  return s == "-0.0" ? "0.0" : s;
}

Json load_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot open '" + p.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

}  // namespace

// ---- config ----

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  ScenarioConfig c;
  c.config_path = path;
  const std::string file = path.string();
  Reader top(j, "", file);
  std::string scenario = std::string(zoning::to_string(c.scenario));
  top.get("scenario", scenario);
  try {
    c.scenario = zoning::parse_scenario(scenario);
  } catch (const std::exception& e) {
    top.fail(e.what());
  }
  top.get("solar_share_target", c.solar_share_target);
  top.get("seed", c.seed);

  fs::path input_dir;
  if (auto in_obj = top.object("inputs")) {
    in_obj->path("dir", input_dir);
    in_obj->path("ordinances", c.inputs.ordinances);
    in_obj->path("subdivisions", c.inputs.subdivisions);
    in_obj->path("roads", c.inputs.roads);
    in_obj->path("transmission", c.inputs.transmission);
    in_obj->path("exclusions", c.inputs.exclusions);
    in_obj->path("costs", c.inputs.costs);
    in_obj->path("regions", c.inputs.regions);
    in_obj->path("demand", c.inputs.demand);
    in_obj->path("corridors", c.inputs.corridors);
    in_obj->path("existing_fleet", c.inputs.existing_fleet);
    in_obj->path("cf_override", c.inputs.cf_override);
    in_obj->finish();
  }
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  c.inputs = dataset::resolve(c.inputs, input_dir.is_absolute() ? input_dir : base / input_dir);

  if (auto p = top.object("parcels")) {
    p->get("sizes_ha", c.parcel_sizes_ha);
    p->get("participation_rate", c.participation_rate);
    p->finish();
  }
  if (auto s = top.object("supply")) {
    s->get("solar_power_density_w_per_m2", c.solar_power_density_w_per_m2);
    s->get("wind_power_density_w_per_m2", c.wind_power_density_w_per_m2);
    s->get("top_site_fraction", c.top_site_fraction);
    s->get("include_wind", c.include_wind);
    if (auto u = s->object("unzoned_defaults")) {
      u->get("road_setback_m", c.unzoned_defaults.road_setback_m);
      u->get("ppl_setback_m", c.unzoned_defaults.ppl_setback_m);
      u->get("nppl_setback_m", c.unzoned_defaults.nppl_setback_m);
      u->get("min_lot_size_m2", c.unzoned_defaults.min_lot_size_m2);
      Json max_lot = nullptr;
      u->get("max_lot_size_m2", max_lot);
      if (!max_lot.is_null() && !max_lot.is_number()) u->fail("bad value for 'max_lot_size_m2'");
      c.unzoned_defaults.max_lot_size_m2 = or_infinity(max_lot);
      u->finish();
    }
    s->finish();
  }
  if (auto e = top.object("expansion")) {
    e->get("periods", c.periods);
    e->get("reserve_margin", c.reserve_margin);
    e->get("days_per_season", c.days_per_season);
    e->get("dispatchable_techs", c.dispatchable_techs);
    if (auto st = e->object("storage")) {
      st->get("enabled", c.storage_enabled);
      st->get("round_trip_efficiency", c.storage.round_trip_efficiency);
      st->get("energy_capex_usd_per_kwh", c.storage.energy_capex_usd_per_kwh);
      st->finish();
    }
    e->get("demand_growth_per_yr", c.demand_growth_per_yr);
    e->get("transmission_discount_rate", c.transmission_discount_rate);
    e->get("transmission_lifetime_yr", c.transmission_lifetime_yr);
    e->get("myopic", c.myopic);
    e->finish();
  }
  top.finish();
  try {
    validate(c);
  } catch (const ConfigError& e) {
    throw ConfigError(file + ": " + e.what());
  }
  return c;
}

std::string config_json(const ScenarioConfig& config) { return config_to_json(config).dump(2); }

void validate(const ScenarioConfig& c) {
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  require(c.solar_share_target >= 0.0 && c.solar_share_target <= 1.0, "solar_share_target must lie in [0, 1]");
  require(!c.parcel_sizes_ha.empty(), "parcels.sizes_ha must not be empty");
  for (double s : c.parcel_sizes_ha) require(s > 0.0 && std::isfinite(s), "parcel sizes must be positive");
  require(c.participation_rate >= 0.0 && c.participation_rate <= 1.0, "participation_rate must lie in [0, 1]");
  require(c.solar_power_density_w_per_m2 > 0.0 && c.wind_power_density_w_per_m2 > 0.0,
          "power densities must be positive");
  require(c.top_site_fraction > 0.0 && c.top_site_fraction <= 1.0, "top_site_fraction must lie in (0, 1]");
  const auto& u = c.unzoned_defaults;
  require(u.road_setback_m >= 0.0 && u.ppl_setback_m >= 0.0 && u.nppl_setback_m >= 0.0 && u.min_lot_size_m2 >= 0.0 &&
              u.max_lot_size_m2 >= u.min_lot_size_m2,
          "unzoned_defaults must be nonnegative with min lot ≤ max lot");
  require(!c.periods.empty(), "expansion.periods must not be empty");
  for (std::size_t i = 1; i < c.periods.size(); ++i) require(c.periods[i] > c.periods[i - 1], "periods must increase");
  require(c.reserve_margin >= 0.0, "reserve_margin must be nonnegative");
  require(c.days_per_season >= 1, "days_per_season must be at least 1");
  require(c.storage.round_trip_efficiency > 0.0 && c.storage.round_trip_efficiency <= 1.0,
          "storage round_trip_efficiency must lie in (0, 1]");
  require(c.storage.energy_capex_usd_per_kwh >= 0.0, "storage energy capex must be nonnegative");
  require(c.demand_growth_per_yr > -1.0, "demand_growth_per_yr must exceed -1");
  require(c.transmission_discount_rate > 0.0 && c.transmission_discount_rate < 1.0,
          "transmission_discount_rate must lie in (0, 1)");
  require(c.transmission_lifetime_yr >= 1, "transmission_lifetime_yr must be at least 1");
}

// ---- pipeline stages ----

std::map<std::string, supply::SiteEconomics> solar_economics(const dataset::Dataset& data, std::uint64_t seed,
                                                             int cost_year) {
  return economics(data, seed, cost_year, "solar");
}

std::map<std::string, supply::SiteEconomics> wind_economics(const dataset::Dataset& data, std::uint64_t seed,
                                                            int cost_year) {
  return economics(data, seed, cost_year, "wind");
}

LandModel build_land_model(const dataset::Dataset& data, const ScenarioConfig& config) {
  std::vector<Polyline> roads;
  for (const auto& r : data.roads) roads.push_back(r.polyline);
  std::vector<double> sizes_m2;
  for (double ha : config.parcel_sizes_ha) sizes_m2.push_back(ha * kSquareMetersPerHectare);

  std::vector<std::vector<parcels::Parcel>> per_sub(data.subdivisions.size());
  parallel_for(data.subdivisions.size(), [&](std::size_t i) {
    const auto& s = data.subdivisions[i];
    per_sub[i] = parcels::generate_parcels(s.polygon, s.subdivision_id, sizes_m2, roads,
                                           parcel_seed(config.seed, s.subdivision_id));
  });
  std::vector<parcels::Parcel> all;
  for (auto& v : per_sub) std::move(v.begin(), v.end(), std::back_inserter(all));
  all = parcels::classify_all(all, roads, config.participation_rate, participation_seed(config.seed));

  LandModel land;
  land.parcels = parcels::apply_exclusions(all, parcels::ExclusionMask{data.exclusions});
  const int year = config.periods.front();
  land.solar = solar_economics(data, config.seed, year);
  if (config.include_wind) land.wind = wind_economics(data, config.seed, year);
  return land;
}

ScenarioSupply evaluate_scenario(const dataset::Dataset& data, const LandModel& land, const ScenarioConfig& config,
                                 zoning::ScenarioKind scenario) {
  ScenarioSupply s;
  s.scenario = scenario;
  s.rules = zoning::scenario_rules(data.ordinances, scenario, progressive_seed(config.seed), config.unzoned_defaults);
  s.areas = supply::evaluate_parcels(land.parcels, s.rules);
  s.solar_sites = supply::make_sites(land.parcels, s.areas, land.solar, config.solar_power_density_w_per_m2);
  if (config.include_wind) {
    // Wind spacing is not governed by solar ordinances: whole parcels count.
    std::vector<geometry::DevelopableArea> whole;
    for (const auto& p : land.parcels) whole.push_back({p.parcel_id, {}, p.area_m2(), geometry::LimitingRule::None});
    s.wind_sites = supply::make_sites(land.parcels, whole, land.wind, config.wind_power_density_w_per_m2);
  }
  s.curve = supply::build_supply_curve(s.solar_sites, std::string(zoning::to_string(scenario)));
  return s;
}

expansion::PlanningProblem make_problem(const dataset::Dataset& data, const LandModel& land,
                                        const ScenarioConfig& config, const ScenarioSupply& supply) {
  (void)land;
  expansion::PlanningProblem pb;
  pb.periods = config.periods;
  for (const auto& r : data.regions) {
    expansion::Region region{r.region_id, r.centroid, {}};
    for (int year : pb.periods) {
      const double g = std::pow(1.0 + config.demand_growth_per_yr, year - pb.periods.front());
      std::vector<double> d = r.demand_8760;
      for (double& v : d) v *= g;
      region.demand_8760[year] = std::move(d);
    }
    pb.regions.push_back(std::move(region));
  }
  std::map<std::string, Point> centroids;
  for (const auto& r : data.regions) centroids[r.region_id] = r.centroid;
  for (const auto& c : data.corridors) {
    const double miles = planar::distance(centroids.at(c.region_a), centroids.at(c.region_b)) / kMetersPerMile;
    pb.corridors.push_back(
        {c.region_a, c.region_b, c.existing_capacity_mw, c.cost_usd_per_mw_mile * miles, c.expandable});
  }
  pb.solar_sites = supply::top_fraction(supply.solar_sites, config.top_site_fraction);
  pb.wind_sites = supply.wind_sites;
  pb.dispatchable_techs = config.dispatchable_techs;
  pb.storage_enabled = config.storage_enabled;
  pb.storage = config.storage;
  pb.costs = data.costs;
  pb.transmission_discount_rate = config.transmission_discount_rate;
  pb.transmission_lifetime_yr = config.transmission_lifetime_yr;
  pb.reserve_margin = config.reserve_margin;
  pb.solar_share_target = config.solar_share_target;
  pb.existing = data.existing;
  pb.days_per_season = config.days_per_season;
  pb.myopic = config.myopic;
  expansion::validate(pb);
  return pb;
}

Outcome run_scenario(const ScenarioConfig& config, const fs::path& out_dir) {
  return guarded([&]() -> Outcome {
    Prepared p = prepare(config);
    const auto w = stage("supply", [&] {
      return supply::waterfall(p.land.parcels, p.data.ordinances, p.land.solar, config.unzoned_defaults,
                               config.solar_power_density_w_per_m2);
    });
    const auto plan = stage("expansion", [&] { return expansion::run_plan(p.problem); });
    if (plan.status == lp::Status::Infeasible) return {kInfeasible, "expansion: " + plan.diagnostic};
    if (plan.status != lp::Status::Optimal) {
      return {kInternalError, "expansion: solver status " + std::string(lp::to_string(plan.status)) + ": " +
                                  plan.diagnostic};
    }
    stage("output", [&] {
      StagingDir dir(out_dir);
      const auto curves = output_curves(w, p.supply);
      {
        auto out = open_out(dir / "supply_curve.csv");
        supply::write_supply_curves(out, curves);
      }
      {
        auto out = open_out(dir / "waterfall.csv");
        supply::write_waterfall(out, w);
      }
      {
        auto out = open_out(dir / "investments.csv");
        expansion::write_investments_csv(out, plan);
      }
      {
        auto out = open_out(dir / "plan.json");
        expansion::write_plan_json(out, p.problem, plan);
      }
      {
        auto out = open_out(dir / "run_metadata.json");
        out << metadata(config, p.data, p.land, p.supply, w, p.problem, plan).dump(2) << '\n';
      }
      {
        std::vector<supply::SupplyCurve> plotted{w.unregulated_curve, w.layers.back().curve};
        plotted.back().label = "baseline";
        if (p.supply.scenario == zoning::ScenarioKind::Progressive) plotted.push_back(p.supply.curve);
        auto out = open_out(dir / "supply_curves.svg");
        svg::supply_curves(out, plotted);
      }
      {
        auto out = open_out(dir / "capacity_by_region.svg");
        svg::capacity_bars(out, final_capacity(p.problem, plan),
                           "Capacity in " + std::to_string(p.problem.periods.back()) + " (" +
                               std::string(zoning::to_string(config.scenario)) + ")");
      }
      dir.commit();
      return 0;
    });
    return {kOk, "wrote " + out_dir.string()};
  });
}

Outcome geometry_debug(const ScenarioConfig& config, const fs::path& out_dir,
                       const std::optional<std::string>& subdivision) {
  return guarded([&]() -> Outcome {
    stage("config", [&] {
      validate(config);
      return 0;
    });
    const auto data = stage("inputs", [&] { return dataset::read(config.inputs); });
    if (subdivision) {
      const bool known = std::any_of(data.subdivisions.begin(), data.subdivisions.end(),
                                     [&](const auto& s) { return s.subdivision_id == *subdivision; });
      if (!known) return {kConfigError, "geometry-debug: unknown subdivision '" + *subdivision + "'"};
    }
    auto land = stage("parcels", [&] { return build_land_model(data, config); });
    const auto supply = stage("geometry", [&] { return evaluate_scenario(data, land, config, config.scenario); });
    std::vector<parcels::Parcel> parcels;
    std::vector<geometry::DevelopableArea> areas;
    for (std::size_t i = 0; i < land.parcels.size(); ++i) {
      if (subdivision && land.parcels[i].subdivision_id != *subdivision) continue;
      parcels.push_back(land.parcels[i]);
      areas.push_back(supply.areas[i]);
    }
    stage("output", [&] {
      StagingDir dir(out_dir);
      {
        auto out = open_out(dir / "parcels.geojson");
        geojson::write_parcels(out, parcels);
      }
      {
        auto out = open_out(dir / "developable.geojson");
        geojson::write_developable(out, areas);
      }
      {
        auto out = open_out(dir / "parcels.csv");
        out << "parcel_id,subdivision_id,parcel_area_m2,developable_area_m2,limiting_rule\n";
        for (std::size_t i = 0; i < parcels.size(); ++i) {
          out << csv::escape(parcels[i].parcel_id) << ',' << csv::escape(parcels[i].subdivision_id) << ','
              << csv::format_double(parcels[i].area_m2()) << ',' << csv::format_double(areas[i].area_m2) << ','
              << geometry::to_string(areas[i].limiting_rule) << '\n';
        }
      }
      dir.commit();
      return 0;
    });
    return {kOk, "wrote " + std::to_string(parcels.size()) + " parcels to " + out_dir.string()};
  });
}

Outcome export_lp(const ScenarioConfig& config, const fs::path& mps_path) {
  return guarded([&]() -> Outcome {
    Prepared p = prepare(config);
    stage("output", [&] {
      if (mps_path.has_parent_path()) fs::create_directories(mps_path.parent_path());
      const fs::path tmp = mps_path.string() + ".tmp-" + std::to_string(::getpid());
      try {
        lp::write_mps_file(tmp.string(), expansion::assemble_lp(p.problem));
        fs::rename(tmp, mps_path);
      } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
      }
      return 0;
    });
    return {kOk, "wrote " + mps_path.string()};
  });
}

// ---- comparison ----

std::vector<CompareRow> compare_runs(const fs::path& dir_a, const fs::path& dir_b) {
  const Json meta_a = load_json(dir_a / "run_metadata.json");
  const Json meta_b = load_json(dir_b / "run_metadata.json");
  const Json plan_a = load_json(dir_a / "plan.json");
  const Json plan_b = load_json(dir_b / "plan.json");
  for (const char* key : {"periods", "regions", "technologies"}) {
    if (!meta_a.contains("dimensions") || !meta_b.contains("dimensions")) {
      throw ParseError("run_metadata.json has no dimensions");
    }
    if (meta_a["dimensions"][key] != meta_b["dimensions"][key]) {
      throw ValidationError(std::string("runs differ in problem dimensions: ") + key);
    }
  }
  const Json& dims = meta_a["dimensions"];

  std::vector<CompareRow> rows;
  const auto summary = [](const Json& plan, const char* key) { return plan.at("summary").at(key).get<double>(); };
  rows.push_back({"objective_usd", plan_a.at("objective_usd").get<double>(), plan_b.at("objective_usd").get<double>()});
  for (const char* key : {"annualized_solar_fixed_cost_usd", "built_solar_mw", "built_solar_mean_cf", "built_wind_mw"}) {
    rows.push_back({key, summary(plan_a, key), summary(plan_b, key)});
  }
  using Totals = std::map<std::pair<std::string, std::string>, double>;
  const auto totals = [](const Json& plan) {
    Totals t;
    for (const auto& period : plan.at("periods")) {
      for (const auto& b : period.at("builds")) {
        t[{b.at("region").get<std::string>(), b.at("technology").get<std::string>()}] += b.at("built_mw").get<double>();
      }
      for (const auto& tx : period.at("transmission")) {
        t[{tx.at("region_a").get<std::string>() + "|" + tx.at("region_b").get<std::string>(), "transmission"}] +=
            tx.at("built_mw").get<double>();
      }
    }
    return t;
  };
  const Totals ta = totals(plan_a), tb = totals(plan_b);
  for (const auto& region : dims.at("regions")) {
    for (const auto& tech : dims.at("technologies")) {
      const std::pair key{region.get<std::string>(), tech.get<std::string>()};
      const auto get = [&](const Totals& t) {
        const auto it = t.find(key);
        return it == t.end() ? 0.0 : it->second;
      };
      rows.push_back({"built_mw:" + key.first + ":" + key.second, get(ta), get(tb)});
    }
  }
  std::set<std::pair<std::string, std::string>> corridors;
  for (const auto* t : {&ta, &tb}) {
    for (const auto& [key, mw] : *t) {
      if (key.second == "transmission") corridors.insert(key);
    }
  }
  for (const auto& key : corridors) {
    const auto get = [&](const Totals& t) {
      const auto it = t.find(key);
      return it == t.end() ? 0.0 : it->second;
    };
    rows.push_back({"built_mw:" + key.first + ":transmission", get(ta), get(tb)});
  }
  const auto shares = [](const Json& plan) {
    std::vector<std::pair<int, double>> s;
    for (const auto& p : plan.at("periods")) s.emplace_back(p.at("period").get<int>(), p.at("solar_share").get<double>());
    return s;
  };
  const auto sa = shares(plan_a), sb = shares(plan_b);
  for (std::size_t i = 0; i < sa.size() && i < sb.size(); ++i) {
    rows.push_back({"solar_share:" + std::to_string(sa[i].first), sa[i].second, sb[i].second});
  }
  return rows;
}

void write_comparison(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "metric,run_a,run_b,pct_change\n";
  for (const auto& r : rows) {
    out << csv::escape(r.metric) << ',' << csv::format_double(r.run_a) << ',' << csv::format_double(r.run_b) << ','
        << pct_change(r.run_a, r.run_b) << '\n';
  }
}

}  // namespace solarzoning::pipeline
