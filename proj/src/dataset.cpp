#include "solarzoning/dataset.hpp"

#include <fstream>
#include <set>

#include "solarzoning/csv.hpp"
#include "solarzoning/errors.hpp"

namespace solarzoning::dataset {
namespace fs = std::filesystem;
namespace {

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw ParseError("input file not found: '" + p.string() + "'");
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw ParseError("cannot write '" + p.string() + "'");
  return out;
}

std::string line_context(const fs::path& p, const csv::Table& t, std::size_t i) {
  return p.string() + " line " + std::to_string(t.line_numbers[i]);
}

}  // namespace

Paths resolve(const Paths& paths, const fs::path& base) {
  const auto r = [&](const fs::path& p) { return p.empty() || p.is_absolute() ? p : base / p; };
  Paths out = paths;
  out.ordinances = r(paths.ordinances);
  out.subdivisions = r(paths.subdivisions);
  out.roads = r(paths.roads);
  out.transmission = r(paths.transmission);
  out.exclusions = r(paths.exclusions);
  out.costs = r(paths.costs);
  out.regions = r(paths.regions);
  out.demand = r(paths.demand);
  out.corridors = r(paths.corridors);
  out.existing_fleet = r(paths.existing_fleet);
  out.cf_override = r(paths.cf_override);
  return out;
}

Dataset read(const Paths& paths) {
  for (const auto* p : {&paths.ordinances, &paths.subdivisions, &paths.roads, &paths.transmission, &paths.exclusions,
                        &paths.costs, &paths.regions, &paths.demand, &paths.corridors, &paths.existing_fleet}) {
    require_file(*p);
  }
  Dataset d;
  d.ordinances = zoning::read_ordinance_db(paths.ordinances.string());
  d.subdivisions = geojson::read_subdivisions(paths.subdivisions.string());
  d.roads = geojson::read_polylines(paths.roads.string(), "road_id");
  for (auto& l : geojson::read_polylines(paths.transmission.string(), "line_id")) {
    d.transmission.push_back({l.id, std::move(l.polyline)});
  }
  d.exclusions = geojson::read_polygons(paths.exclusions.string());
  d.costs = resource::read_cost_table(paths.costs.string());

  const csv::Table regions = csv::read_file(paths.regions.string());
  for (std::size_t i = 0; i < regions.rows.size(); ++i) {
    const auto& row = regions.rows[i];
    const std::string where = line_context(paths.regions, regions, i);
    d.regions.push_back({row[regions.require("region_id")],
                         {csv::parse_double(row[regions.require("centroid_x")], where),
                          csv::parse_double(row[regions.require("centroid_y")], where)},
                         {}});
  }
  const csv::Table demand = csv::read_file(paths.demand.string());
  if (demand.rows.size() != static_cast<std::size_t>(resource::kHoursPerYear)) {
    throw ValidationError(paths.demand.string() + ": expected 8760 hourly rows, found " +
                          std::to_string(demand.rows.size()));
  }
  for (auto& r : d.regions) {
    const auto col = demand.find(r.region_id);
    if (!col) throw ValidationError(paths.demand.string() + ": no demand column for region " + r.region_id);
    for (std::size_t h = 0; h < demand.rows.size(); ++h) {
      r.demand_8760.push_back(csv::parse_double(demand.rows[h][*col], line_context(paths.demand, demand, h)));
    }
  }
  const csv::Table corridors = csv::read_file(paths.corridors.string());
  for (std::size_t i = 0; i < corridors.rows.size(); ++i) {
    const auto& row = corridors.rows[i];
    const std::string where = line_context(paths.corridors, corridors, i);
    d.corridors.push_back({row[corridors.require("region_a")], row[corridors.require("region_b")],
                           csv::parse_double(row[corridors.require("existing_capacity_mw")], where),
                           csv::parse_double(row[corridors.require("cost_usd_per_mw_mile")], where),
                           csv::parse_bool(row[corridors.require("expandable")], where)});
  }
  const csv::Table fleet = csv::read_file(paths.existing_fleet.string());
  for (std::size_t i = 0; i < fleet.rows.size(); ++i) {
    const auto& row = fleet.rows[i];
    d.existing[row[fleet.require("region_id")]][row[fleet.require("technology")]] +=
        csv::parse_double(row[fleet.require("capacity")], line_context(paths.existing_fleet, fleet, i));
  }
  if (!paths.cf_override.empty()) {
    require_file(paths.cf_override);
    d.cf_override = resource::read_cf_override(paths.cf_override.string());
  }
  validate(d);
  return d;
}

void validate(const Dataset& d) {
  std::set<std::string> jurisdictions, regions, subdivisions;
  for (const auto& r : d.ordinances) jurisdictions.insert(r.jurisdiction_id);
  for (const auto& r : d.regions) {
    if (!regions.insert(r.region_id).second) throw ValidationError("duplicate region '" + r.region_id + "'");
  }
  for (const auto& s : d.subdivisions) {
    if (!subdivisions.insert(s.subdivision_id).second) {
      throw ValidationError("duplicate subdivision '" + s.subdivision_id + "'");
    }
    if (!jurisdictions.count(s.subdivision_id)) {
      throw ValidationError("subdivision '" + s.subdivision_id + "' has no ordinance record");
    }
    if (!regions.count(s.region_id)) {
      throw ValidationError("subdivision '" + s.subdivision_id + "' maps to unknown region '" + s.region_id + "'");
    }
  }
  for (const auto& c : d.corridors) {
    if (!regions.count(c.region_a) || !regions.count(c.region_b)) throw ValidationError("corridor references an unknown region");
    if (!(c.existing_capacity_mw >= 0.0) || !(c.cost_usd_per_mw_mile >= 0.0)) throw ValidationError("negative corridor data");
  }
  for (const auto& [rid, techs] : d.existing) {
    if (!regions.count(rid)) throw ValidationError("existing fleet in unknown region '" + rid + "'");
  }
  if (d.transmission.empty()) throw ValidationError("no transmission network");
  for (const auto& [id, s] : d.cf_override) {
    if (!subdivisions.count(id)) throw ValidationError("capacity factor override for unknown subdivision '" + id + "'");
  }
}

void write(const Dataset& d, const fs::path& dir) {
  fs::create_directories(dir);
  const Paths p = resolve(Paths{}, dir);
  {
    auto out = open_out(p.ordinances);
    zoning::write_ordinance_db(out, d.ordinances);
  }
  {
    auto out = open_out(p.subdivisions);
    geojson::write_subdivisions(out, d.subdivisions);
  }
  {
    auto out = open_out(p.roads);
    geojson::write_polylines(out, d.roads, "road_id");
  }
  {
    std::vector<geojson::NamedPolyline> lines;
    for (const auto& l : d.transmission) lines.push_back({l.line_id, l.polyline});
    auto out = open_out(p.transmission);
    geojson::write_polylines(out, lines, "line_id");
  }
  {
    auto out = open_out(p.exclusions);
    geojson::write_polygons(out, d.exclusions);
  }
  resource::write_cost_table(p.costs.string(), d.costs);
  {
    auto out = open_out(p.regions);
    out << "region_id,centroid_x,centroid_y\n";
    for (const auto& r : d.regions) {
      out << csv::escape(r.region_id) << ',' << csv::format_double(r.centroid.x) << ','
          << csv::format_double(r.centroid.y) << '\n';
    }
  }
  {
    auto out = open_out(p.demand);
    out << "hour";
    for (const auto& r : d.regions) out << ',' << csv::escape(r.region_id);
    out << '\n';
    for (int h = 0; h < resource::kHoursPerYear; ++h) {
      out << h;
      for (const auto& r : d.regions) out << ',' << csv::format_double(r.demand_8760.at(h));
      out << '\n';
    }
  }
  {
    auto out = open_out(p.corridors);
    out << "region_a,region_b,existing_capacity_mw,cost_usd_per_mw_mile,expandable\n";
    for (const auto& c : d.corridors) {
      out << csv::escape(c.region_a) << ',' << csv::escape(c.region_b) << ',' << csv::format_double(c.existing_capacity_mw)
          << ',' << csv::format_double(c.cost_usd_per_mw_mile) << ',' << (c.expandable ? "true" : "false") << '\n';
    }
  }
  {
    auto out = open_out(p.existing_fleet);
    out << "region_id,technology,capacity\n";
    for (const auto& [rid, techs] : d.existing) {
      for (const auto& [tech, mw] : techs) {
        out << csv::escape(rid) << ',' << csv::escape(tech) << ',' << csv::format_double(mw) << '\n';
      }
    }
  }
}

}  // namespace solarzoning::dataset
