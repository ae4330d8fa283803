#pragma once

// The non-zoning inputs of a study area, read from and written to a
// directory of CSV and GeoJSON files.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "solarzoning/geojson.hpp"
#include "solarzoning/resource.hpp"
#include "solarzoning/zoning.hpp"

namespace solarzoning::dataset {

struct RegionInfo {
  std::string region_id;
  Point centroid;
  std::vector<double> demand_8760;  // base (first) model year, MWh per hour
};

struct CorridorInfo {
  std::string region_a;
  std::string region_b;
  double existing_capacity_mw = 0.0;
  double cost_usd_per_mw_mile = 0.0;
  bool expandable = true;
};

struct Dataset {
  std::vector<geojson::Subdivision> subdivisions;
  std::vector<geojson::NamedPolyline> roads;
  std::vector<resource::TransmissionLine> transmission;
  std::vector<Polygon> exclusions;
  std::vector<zoning::OrdinanceRecord> ordinances;
  resource::CostTable costs;
  std::vector<RegionInfo> regions;
  std::vector<CorridorInfo> corridors;
  std::map<std::string, std::map<std::string, double>> existing;  // region → technology → MW (MWh for battery_energy)
  std::map<std::string, resource::CapacityFactorSeries> cf_override;  // subdivision → series
};

struct Paths {
  std::filesystem::path ordinances = "ordinances.csv";
  std::filesystem::path subdivisions = "subdivisions.geojson";
  std::filesystem::path roads = "roads.geojson";
  std::filesystem::path transmission = "transmission.geojson";
  std::filesystem::path exclusions = "exclusions.geojson";
  std::filesystem::path costs = "costs.csv";
  std::filesystem::path regions = "regions.csv";
  std::filesystem::path demand = "demand.csv";
  std::filesystem::path corridors = "corridors.csv";
  std::filesystem::path existing_fleet = "existing_fleet.csv";
  std::filesystem::path cf_override;  // optional
};

// Paths resolved against `base` (absolute paths are kept).
Paths resolve(const Paths& paths, const std::filesystem::path& base);

/// Reads every file; errors name the offending path. Throws ParseError for
/// unreadable files and ValidationError for inconsistent content (unknown
/// regions, subdivisions without an ordinance, and so on).
Dataset read(const Paths& paths);

/// Writes the standard file names into `dir` (created if needed).
void write(const Dataset& data, const std::filesystem::path& dir);

void validate(const Dataset& data);

}  // namespace solarzoning::dataset
