#pragma once

// Generators, oracles and fixtures shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "solarzoning/expansion.hpp"
#include "solarzoning/parcels.hpp"
#include "solarzoning/planar.hpp"
#include "solarzoning/random.hpp"
#include "solarzoning/resource.hpp"
#include "solarzoning/zoning.hpp"

namespace sztest {

using namespace solarzoning;

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

// Star-shaped simple polygon around `center`: vertex angles jittered around
// an even spacing (every angular gap stays below π), radii in
// [0.45, 1]·radius.
inline Polygon random_star_polygon(Rng& rng, int vertices, double radius, Point center = {0.0, 0.0}) {
  const double step = 2.0 * std::numbers::pi / vertices;
  const double phase = uniform(rng, 0.0, step);
  Polygon p;
  for (int i = 0; i < vertices; ++i) {
    const double a = phase + step * (i + uniform(rng, -0.3, 0.3));
    const double r = radius * uniform(rng, 0.45, 1.0);
    p.outer.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  planar::normalize(p);
  return p;
}

inline parcels::EdgeClass random_edge_class(Rng& rng) {
  return static_cast<parcels::EdgeClass>(uniform_index(rng, 3));
}

inline parcels::Parcel random_parcel(Rng& rng, const std::string& id, int vertices, double radius) {
  auto parcel = parcels::Parcel::make(id, "S", random_star_polygon(rng, vertices, radius));
  for (auto& ring : parcel.edge_classes) {
    for (auto& c : ring) c = random_edge_class(rng);
  }
  return parcel;
}

inline double setback_for(const zoning::RuleLimits& l, parcels::EdgeClass c) {
  switch (c) {
    case parcels::EdgeClass::Road: return l.road_setback_m;
    case parcels::EdgeClass::ParticipatingLine: return l.ppl_setback_m;
    case parcels::EdgeClass::NonParticipatingLine: return l.nppl_setback_m;
  }
  return 0.0;
}

// True if `p` keeps at least its class setback from every classed edge.
inline bool clear_of_setbacks(Point p, const std::vector<parcels::Edge>& edges, const zoning::RuleLimits& l) {
  for (const auto& e : edges) {
    const double s = setback_for(l, e.edge_class);
    if (s > 0.0 && planar::distance(p, e.segment) < s) return false;
  }
  return true;
}

// Monte-Carlo developable-area oracle: `samples` points drawn uniformly
// in the parcel (jittered strata over its bounding box, rejecting points
// outside) and kept if clear of every setback.
inline double monte_carlo_area(const parcels::Parcel& parcel, const zoning::RuleLimits& limits,
                               std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  const auto edges = parcel.edges();
  const Box b = planar::bounds(parcel.polygon);
  const double w = b.max.x - b.min.x, h = b.max.y - b.min.y;
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(samples) * w * h /
                                                                   planar::area(parcel.polygon))));
  std::size_t inside = 0, kept = 0;
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      const Point p{b.min.x + w * (static_cast<double>(i) + unit_uniform(rng)) / static_cast<double>(side),
                    b.min.y + h * (static_cast<double>(j) + unit_uniform(rng)) / static_cast<double>(side)};
      if (!planar::contains(parcel.polygon, p)) continue;
      ++inside;
      if (clear_of_setbacks(p, edges, limits)) ++kept;
    }
  }
  return inside == 0 ? 0.0 : planar::area(parcel.polygon) * static_cast<double>(kept) / static_cast<double>(inside);
}

inline Polygon rect(double x0, double y0, double x1, double y1) {
  Polygon p{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, {}};
  planar::normalize(p);
  return p;
}

inline std::shared_ptr<const resource::CapacityFactorSeries> flat_cf(const std::string& id, double cf) {
  return std::make_shared<resource::CapacityFactorSeries>(
      resource::CapacityFactorSeries::from_values(id, std::vector<double>(resource::kHoursPerYear, cf)));
}

inline supply::SupplySite site(const std::string& id, const std::string& region, double capacity_mw,
                               std::shared_ptr<const resource::CapacityFactorSeries> cf, double lcoe = 50.0) {
  supply::SupplySite s;
  s.subdivision_id = id;
  s.region_id = region;
  s.capacity_mw = capacity_mw;
  s.lcoe_usd_per_mwh = lcoe;
  s.cf = std::move(cf);
  return s;
}

inline resource::CostAssumptions cost(double capex_kw, double fom_kw_yr, double vom, double fuel,
                                      double rate = 0.07, int life = 20) {
  resource::CostAssumptions c;
  c.capex_usd_per_kw = capex_kw;
  c.fixed_om_usd_per_kw_yr = fom_kw_yr;
  c.variable_om_usd_per_mwh = vom;
  c.fuel_usd_per_mwh = fuel;
  c.discount_rate = rate;
  c.lifetime_yr = life;
  return c;
}

// Yearly cost of one MW: capital recovery plus fixed O&M.
inline double annual_per_mw(const resource::CostAssumptions& c) {
  return resource::crf(c.discount_rate, c.lifetime_yr) * c.capex_usd_per_kw * 1000.0 + c.fixed_om_usd_per_kw_yr * 1000.0;
}

inline expansion::Region region(const std::string& id, int year, std::vector<double> demand_8760,
                                Point centroid = {}) {
  expansion::Region r;
  r.region_id = id;
  r.centroid = centroid;
  r.demand_8760[year] = std::move(demand_8760);
  return r;
}

inline std::vector<double> flat(double v) { return std::vector<double>(resource::kHoursPerYear, v); }

// Single-period problem over one representative day carrying all 365 days.
inline expansion::PlanningProblem one_day_problem(int year = 2030) {
  expansion::PlanningProblem pb;
  pb.periods = {year};
  pb.rep_days = {{0, 365.0, true}};
  pb.storage_enabled = false;
  return pb;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("solarzoning-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace sztest
